//! Wall-clock latency of the per-CPI extraction core.
//!
//! Measures `extract_frame` alone (dynamic separation through Doppler FFT)
//! on a fixed scene, single-threaded, with warm-up iterations excluded.
//! The default configuration is the 30-subcarrier / 128-symbol / 32-delay-bin
//! operating point.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::Result;
use crate::extract::{extract_frame, DelayGrid, ExtractConfig};
use crate::sim::{generate_csi, ClockImpairment, DynamicPath, PathScene, StaticPath, SubcarrierGrid};
use crate::srcc::{srcc, SrccMatrix};
use crate::SPEED_OF_LIGHT;

/// Benchmark parameters.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Timed repetitions (>= 10).
    pub repetitions: usize,
    /// Untimed warm-up repetitions.
    pub warmup: usize,
    /// Delay bins in the search grid (1 m spacing from 0).
    pub delay_bins: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { repetitions: 100, warmup: 10, delay_bins: 32 }
    }
}

/// Latency summary in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyStats {
    pub mean_ms: f64,
    pub std_ms: f64,
    pub median_ms: f64,
    /// One entry per timed repetition.
    pub samples_ms: Vec<f64>,
}

impl LatencyStats {
    fn from_samples(mut samples_ms: Vec<f64>) -> Self {
        let n = samples_ms.len() as f64;
        let mean = samples_ms.iter().sum::<f64>() / n;
        let var = samples_ms.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        let mut sorted = samples_ms.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        samples_ms.shrink_to_fit();
        Self { mean_ms: mean, std_ms: var.sqrt(), median_ms: median, samples_ms }
    }
}

fn bench_scene() -> PathScene {
    let m = 128;
    let mut scene = PathScene {
        grid: SubcarrierGrid::uniform(30, 5.18e9, 20e6, 1e-3, m),
        static_paths: vec![StaticPath {
            attenuation: Complex64::new(1.0, 0.0),
            delay: 40e-9,
        }],
        dynamic_paths: vec![DynamicPath {
            attenuation: Complex64::from_polar(0.3, 0.8),
            delay: 40e-9 + 8.0 / SPEED_OF_LIGHT,
            doppler: 40.0,
        }],
        impairment: ClockImpairment::none(m),
    };
    scene.impairment.noise_power = scene.noise_power_for_snr_db(20.0);
    scene
}

fn bench_input() -> Result<(SrccMatrix, Vec<f64>, f64)> {
    let scene = bench_scene();
    let frame = generate_csi(&scene, 1)?;
    let cfg = ExtractConfig::default();
    let d = srcc(&frame, &cfg.window)?;
    let sample_rate = scene.grid.sample_rate();
    Ok((d, scene.grid.frequencies, sample_rate))
}

/// Time `extract_frame` on the canonical scene.
pub fn bench_pipeline(config: &BenchConfig) -> Result<LatencyStats> {
    assert!(config.repetitions >= 10, "need at least 10 repetitions");
    let (d, frequencies, sample_rate) = bench_input()?;
    let grid = DelayGrid::from_range_meters(0.0, config.delay_bins as f64, 1.0)?;
    let extract_cfg = ExtractConfig::default();

    for _ in 0..config.warmup {
        let frame = extract_frame(&d, &grid, &frequencies, sample_rate, &extract_cfg)?;
        std::hint::black_box(&frame);
    }
    let mut samples = Vec::with_capacity(config.repetitions);
    for _ in 0..config.repetitions {
        let t0 = Instant::now();
        let frame = extract_frame(&d, &grid, &frequencies, sample_rate, &extract_cfg)?;
        let dt = t0.elapsed();
        std::hint::black_box(&frame);
        samples.push(dt.as_secs_f64() * 1e3);
    }
    Ok(LatencyStats::from_samples(samples))
}

/// Latency at several delay-grid sizes, for scaling checks.
pub fn bench_scaling(delay_bin_sets: &[usize], repetitions: usize) -> Result<Vec<(usize, LatencyStats)>> {
    delay_bin_sets
        .iter()
        .map(|&bins| {
            let stats = bench_pipeline(&BenchConfig {
                repetitions,
                warmup: 5,
                delay_bins: bins,
            })?;
            Ok((bins, stats))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_requested_sample_count() {
        let stats = bench_pipeline(&BenchConfig { repetitions: 12, warmup: 2, delay_bins: 8 }).unwrap();
        assert_eq!(stats.samples_ms.len(), 12);
        assert!(stats.mean_ms > 0.0);
        assert!(stats.median_ms > 0.0);
        assert!(stats.std_ms >= 0.0);
    }

    #[test]
    fn doubling_delay_bins_scales_gently() {
        // Per-bin weight computation dominates, so latency should grow at
        // most ~linearly (2.5x allows constant overhead and timer noise).
        let runs = bench_scaling(&[16, 32], 30).unwrap();
        let r = runs[1].1.median_ms / runs[0].1.median_ms;
        assert!(r <= 2.5, "latency ratio {r:.2} for 2x delay bins");
    }
}

//! Cross-module integration tests: baseline contrasts and feature maps
//! evaluated end to end on simulated scenes.

use bisense_core::baselines::{casr, simulate_dual, ula_companion_scene};
use bisense_core::extract::{compress_delay, extract_tensor, DelayGrid, ExtractConfig};
use bisense_core::geometry::doppler_to_bin;
use bisense_core::metrics::mirror_ratio;
use bisense_core::sim::{
    generate_csi, random_impairment, split_cpis, ClockImpairment, DynamicPath, PathScene,
    StaticPath, SubcarrierGrid,
};
use bisense_core::SPEED_OF_LIGHT;
use num_complex::Complex64;

fn grid(m: usize) -> SubcarrierGrid {
    SubcarrierGrid::uniform(30, 5.18e9, 20e6, 1e-3, m)
}

fn two_target_scene(m: usize) -> PathScene {
    PathScene {
        grid: grid(m),
        static_paths: vec![StaticPath {
            attenuation: Complex64::new(1.0, 0.0),
            delay: 40e-9,
        }],
        dynamic_paths: vec![
            DynamicPath {
                attenuation: Complex64::from_polar(0.3, 0.9),
                delay: 40e-9 + 5.0 / SPEED_OF_LIGHT,
                doppler: 30.0,
            },
            DynamicPath {
                attenuation: Complex64::from_polar(0.3, 2.1),
                delay: 40e-9 + 12.0 / SPEED_OF_LIGHT,
                doppler: -60.0,
            },
        ],
        impairment: ClockImpairment::none(m),
    }
}

#[test]
fn doppler_time_map_carries_both_target_traces() {
    // Delay compression must keep the +30 Hz and -60 Hz lines visible over
    // every CPI of a two-target scene.
    let mut scene = two_target_scene(128 + 3 * 32);
    scene.impairment = random_impairment(scene.grid.num_symbols, 100e-9, 5);
    scene.impairment.noise_power = scene.noise_power_for_snr_db(20.0);
    let frame = generate_csi(&scene, 2).unwrap();
    let cfg = ExtractConfig::default();
    let cpis = split_cpis(&frame, cfg.cpi_symbols, cfg.cpi_stride);
    let dgrid = DelayGrid::from_range_meters(0.0, 32.0, 1.0).unwrap();
    let tensor = extract_tensor(&cpis, &dgrid, &cfg).unwrap();
    let map = compress_delay(&tensor);

    let k30 = doppler_to_bin(30.0, &map.doppler_axis).unwrap();
    let k60 = doppler_to_bin(-60.0, &map.doppler_axis).unwrap();
    let (nf, nt) = map.magnitudes.dim();
    let noise_floor = {
        // Median cell magnitude as the background reference.
        let mut all: Vec<f64> = map.magnitudes.iter().cloned().collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all[all.len() / 2]
    };
    for t in 0..nt {
        for (k, f) in [(k30, 30.0), (k60, -60.0)] {
            let line: f64 = (k.saturating_sub(1)..=(k + 1).min(nf - 1))
                .map(|kk| map.magnitudes[(kk, t)])
                .fold(0.0, f64::max);
            assert!(
                line > 5.0 * noise_floor,
                "trace at {f} Hz invisible in CPI {t}: {line} vs floor {noise_floor}"
            );
        }
    }
}

#[test]
fn casr_suppresses_mirror_with_static_dominant_reference() {
    // Ratio-based cancellation has no conjugate mirror term, so the Doppler
    // spectrum of the CASR output favors the true side by >= 6 dB.
    let m = 128;
    let scene_a = PathScene {
        grid: grid(m),
        static_paths: vec![StaticPath {
            attenuation: Complex64::new(1.0, 0.0),
            delay: 40e-9,
        }],
        dynamic_paths: vec![DynamicPath {
            attenuation: Complex64::from_polar(0.25, 0.7),
            delay: 40e-9 + 8.0 / SPEED_OF_LIGHT,
            doppler: 40.0,
        }],
        impairment: ClockImpairment::none(m),
    };
    let scene_b = ula_companion_scene(&scene_a, 11);
    let imp = random_impairment(m, 100e-9, 3);
    let dual = simulate_dual(&scene_a, &scene_b, &imp, 1).unwrap();
    let ratio_matrix = casr(&dual).unwrap();

    // Per-subcarrier Doppler spectrum of the de-meaned ratio series,
    // averaged over subcarriers.
    let (n, msz) = ratio_matrix.values.dim();
    let dt = 1e-3;
    let axis: Vec<f64> = (-19..=19).map(|k| k as f64 * (1000.0 / m as f64)).collect();
    let mut power = vec![0.0f64; axis.len()];
    for i in 0..n {
        let row: Vec<Complex64> = (0..msz).map(|j| ratio_matrix.values[(i, j)]).collect();
        let mean = row.iter().sum::<Complex64>() / msz as f64;
        for (k, &f) in axis.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in row.iter().enumerate() {
                acc += (v - mean)
                    * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f * j as f64 * dt);
            }
            power[k] += acc.norm_sqr();
        }
    }
    let mags: Vec<f64> = power.iter().map(|p| p.sqrt()).collect();
    let db = mirror_ratio(&mags, &axis, 40.0).unwrap();
    assert!(db >= 6.0, "CASR mirror ratio only {db:.1} dB");
}

#[test]
fn default_extraction_config_matches_operating_point() {
    let cfg = ExtractConfig::default();
    assert_eq!(cfg.window.ifft_size, 128);
    assert_eq!(cfg.window.sigma, 64.0);
    assert_eq!(cfg.cpi_symbols, 128);
    assert_eq!(cfg.cpi_stride, 32);
    assert_eq!(cfg.doppler_crop, (-150.0, 150.0));
    let dgrid = DelayGrid::from_range_meters(0.0, 32.0, 1.0).unwrap();
    assert_eq!(dgrid.len(), 32);
    assert_eq!(dgrid.as_range_meters()[31], 31.0);
}

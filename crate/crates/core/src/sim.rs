//! Synthetic bistatic SISO CSI with exact ground truth.
//!
//! The channel at subcarrier `i`, symbol `j` is the product of a
//! unit-magnitude clock phasor and a multipath sum:
//!
//! ```text
//! CSI[i][j] = exp(-J (2 pi f_i to[j] + cfo[j])) * exp(-J phi_h)
//!             * ( sum_l  rhoS_l exp(-J 2 pi f_i tauS_l)
//!               + sum_l  rhoX_l exp(-J 2 pi (f_i tauX_l + fD_l * j * dt)) )
//!             + noise,   noise ~ CN(0, eta^2)
//! ```
//!
//! Every downstream stage is tested against scenes built here, because the
//! scene carries the exact path delays and Doppler shifts.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::BistaticGeometry;

/// Subcarrier frequencies and symbol timing shared by a CSI block.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierGrid {
    /// Absolute carrier frequency of each subcarrier (Hz), strictly increasing.
    pub frequencies: Vec<f64>,
    /// OFDM symbol interval (s).
    pub symbol_interval: f64,
    /// Number of symbols M in the block.
    pub num_symbols: usize,
}

impl SubcarrierGrid {
    /// Uniform grid of `n` subcarriers spanning `bandwidth` around `center`.
    ///
    /// Spacing is `bandwidth / n`; the first subcarrier sits at
    /// `center - bandwidth/2`.
    pub fn uniform(n: usize, center: f64, bandwidth: f64, symbol_interval: f64, num_symbols: usize) -> Self {
        let df = bandwidth / n as f64;
        let f0 = center - bandwidth / 2.0;
        Self {
            frequencies: (0..n).map(|i| f0 + i as f64 * df).collect(),
            symbol_interval,
            num_symbols,
        }
    }

    pub fn num_subcarriers(&self) -> usize {
        self.frequencies.len()
    }

    /// Mean spacing between adjacent subcarriers (Hz).
    pub fn mean_spacing(&self) -> f64 {
        let n = self.frequencies.len();
        (self.frequencies[n - 1] - self.frequencies[0]) / (n - 1) as f64
    }

    /// CSI sampling rate along the symbol axis (Hz).
    pub fn sample_rate(&self) -> f64 {
        1.0 / self.symbol_interval
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequencies.len() < 2 {
            return Err(Error::InvalidScene("need at least 2 subcarriers".into()));
        }
        if !self.frequencies.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidScene("subcarrier frequencies must be strictly increasing".into()));
        }
        if !self.symbol_interval.is_finite() || self.symbol_interval <= 0.0 {
            return Err(Error::InvalidScene("symbol interval must be positive".into()));
        }
        if self.num_symbols < 2 {
            return Err(Error::InvalidScene("need at least 2 symbols".into()));
        }
        Ok(())
    }
}

/// A static propagation path: complex attenuation and absolute delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticPath {
    pub attenuation: Complex64,
    /// Propagation delay (s), nonnegative.
    pub delay: f64,
}

/// A moving-scatterer path: attenuation, absolute delay, Doppler shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicPath {
    pub attenuation: Complex64,
    /// Propagation delay (s), nonnegative.
    pub delay: f64,
    /// Doppler frequency shift (Hz); must stay below the symbol-rate Nyquist.
    pub doppler: f64,
}

/// Per-symbol clock impairments plus receiver noise power.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockImpairment {
    /// Timing offset per symbol (s).
    pub timing_offsets: Vec<f64>,
    /// Carrier-frequency-offset phase per symbol (rad).
    pub cfo_phases: Vec<f64>,
    /// Hardware phase fixed for the whole block (rad).
    pub hardware_phase: f64,
    /// Complex Gaussian noise power eta^2 (linear).
    pub noise_power: f64,
}

impl ClockImpairment {
    /// No impairment, no noise.
    pub fn none(num_symbols: usize) -> Self {
        Self {
            timing_offsets: vec![0.0; num_symbols],
            cfo_phases: vec![0.0; num_symbols],
            hardware_phase: 0.0,
            noise_power: 0.0,
        }
    }

    pub fn is_zero_phase(&self) -> bool {
        self.hardware_phase == 0.0
            && self.timing_offsets.iter().all(|&t| t == 0.0)
            && self.cfo_phases.iter().all(|&p| p == 0.0)
    }
}

/// Ground-truth scene: grid, static and dynamic paths, impairments.
#[derive(Debug, Clone, PartialEq)]
pub struct PathScene {
    pub grid: SubcarrierGrid,
    pub static_paths: Vec<StaticPath>,
    pub dynamic_paths: Vec<DynamicPath>,
    pub impairment: ClockImpairment,
}

impl PathScene {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.static_paths.is_empty() {
            return Err(Error::InvalidScene("at least one static path required".into()));
        }
        for p in &self.static_paths {
            if p.delay < 0.0 {
                return Err(Error::InvalidScene("static path delay must be nonnegative".into()));
            }
        }
        let nyquist = 0.5 / self.grid.symbol_interval;
        for p in &self.dynamic_paths {
            if p.delay < 0.0 {
                return Err(Error::InvalidScene("dynamic path delay must be nonnegative".into()));
            }
            if p.doppler.abs() >= nyquist {
                return Err(Error::DopplerBeyondNyquist {
                    doppler_hz: p.doppler,
                    nyquist_hz: nyquist,
                });
            }
        }
        let m = self.grid.num_symbols;
        if self.impairment.timing_offsets.len() != m || self.impairment.cfo_phases.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "impairment vectors must have length M = {m} (got {}, {})",
                self.impairment.timing_offsets.len(),
                self.impairment.cfo_phases.len()
            )));
        }
        if self.impairment.noise_power < 0.0 {
            return Err(Error::InvalidScene("noise power must be nonnegative".into()));
        }
        Ok(())
    }

    /// Mean per-entry power of the noiseless, impairment-free channel.
    ///
    /// Useful to convert an SNR target into a noise power:
    /// `eta^2 = mean_channel_power / 10^(snr_db/10)`.
    pub fn mean_channel_power(&self) -> f64 {
        let h = channel_matrix(self);
        let (n, m) = h.dim();
        h.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * m) as f64
    }

    /// Noise power eta^2 that realizes `snr_db` against the noiseless channel.
    pub fn noise_power_for_snr_db(&self, snr_db: f64) -> f64 {
        self.mean_channel_power() / 10f64.powf(snr_db / 10.0)
    }
}

/// One block of CSI measurements (N subcarriers x M symbols).
#[derive(Debug, Clone, PartialEq)]
pub struct CsiFrame {
    /// samples[(i, j)]: subcarrier i, symbol j.
    pub samples: Array2<Complex64>,
    pub grid: SubcarrierGrid,
}

impl CsiFrame {
    pub fn num_subcarriers(&self) -> usize {
        self.samples.nrows()
    }

    pub fn num_symbols(&self) -> usize {
        self.samples.ncols()
    }

    /// Root-mean-square sample magnitude.
    pub fn rms(&self) -> f64 {
        let (n, m) = self.samples.dim();
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * m) as f64).sqrt()
    }
}

/// Noiseless, impairment-free channel matrix `H^S_i + H^X_{i,j}`.
fn channel_matrix(scene: &PathScene) -> Array2<Complex64> {
    let freqs = &scene.grid.frequencies;
    let n = freqs.len();
    let m = scene.grid.num_symbols;
    let dt = scene.grid.symbol_interval;

    let mut h_static = vec![Complex64::new(0.0, 0.0); n];
    for p in &scene.static_paths {
        for (i, &f) in freqs.iter().enumerate() {
            h_static[i] += p.attenuation * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * p.delay);
        }
    }

    let mut h = Array2::<Complex64>::zeros((n, m));
    for j in 0..m {
        for i in 0..n {
            h[(i, j)] = h_static[i];
        }
    }
    for p in &scene.dynamic_paths {
        for j in 0..m {
            let phase_t = -2.0 * std::f64::consts::PI * p.doppler * j as f64 * dt;
            for (i, &f) in freqs.iter().enumerate() {
                let phase_f = -2.0 * std::f64::consts::PI * f * p.delay;
                h[(i, j)] += p.attenuation * Complex64::from_polar(1.0, phase_f + phase_t);
            }
        }
    }
    h
}

/// Generate a CSI frame from a scene. Deterministic for a fixed `rng_seed`
/// (the seed only drives the additive noise).
pub fn generate_csi(scene: &PathScene, rng_seed: u64) -> Result<CsiFrame> {
    scene.validate()?;
    let freqs = &scene.grid.frequencies;
    let n = freqs.len();
    let m = scene.grid.num_symbols;
    let imp = &scene.impairment;

    let mut samples = channel_matrix(scene);
    if !imp.is_zero_phase() {
        for j in 0..m {
            let common = -(imp.cfo_phases[j] + imp.hardware_phase);
            for i in 0..n {
                let phase = -2.0 * std::f64::consts::PI * freqs[i] * imp.timing_offsets[j] + common;
                samples[(i, j)] *= Complex64::from_polar(1.0, phase);
            }
        }
    }
    if imp.noise_power > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let sigma = (imp.noise_power / 2.0).sqrt();
        for j in 0..m {
            for i in 0..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                samples[(i, j)] += Complex64::new(re * sigma, im * sigma);
            }
        }
    }
    Ok(CsiFrame {
        samples,
        grid: scene.grid.clone(),
    })
}

/// Draw a random clock impairment: per-symbol timing offsets uniform in
/// `[0, to_scale]`, CFO phases uniform in `[0, 2 pi)`, one hardware phase
/// uniform in `[0, 2 pi)`. Noise power is left at zero. Deterministic per seed.
pub fn random_impairment(num_symbols: usize, to_scale: f64, rng_seed: u64) -> ClockImpairment {
    assert!(num_symbols >= 1, "need at least one symbol");
    assert!(to_scale >= 0.0, "timing-offset scale must be nonnegative");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let timing_offsets = (0..num_symbols).map(|_| rng.gen::<f64>() * to_scale).collect();
    let cfo_phases = (0..num_symbols)
        .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
        .collect();
    let hardware_phase = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    ClockImpairment {
        timing_offsets,
        cfo_phases,
        hardware_phase,
        noise_power: 0.0,
    }
}

/// Bistatic excess range of a target: `|P-Tx| + |P-Rx| - |Tx-Rx|` (m).
///
/// This is the ground truth behind the relative delay searched by the
/// delay-domain beamformer (`excess_range = (tauX - tauS_LoS) * c`).
pub fn bistatic_excess_range(geometry: &BistaticGeometry) -> Result<f64> {
    geometry.validate()?;
    let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    Ok(d(geometry.target, geometry.tx) + d(geometry.target, geometry.rx) - d(geometry.tx, geometry.rx))
}

/// Slice a long frame into coherent processing intervals of `window` symbols
/// advancing by `stride`. Trailing symbols that do not fill a window are
/// dropped.
pub fn split_cpis(frame: &CsiFrame, window: usize, stride: usize) -> Vec<CsiFrame> {
    assert!(window >= 1 && stride >= 1, "window and stride must be positive");
    let m = frame.num_symbols();
    let mut out = Vec::new();
    let mut start = 0;
    while start + window <= m {
        let samples = frame.samples.slice(ndarray::s![.., start..start + window]).to_owned();
        let mut grid = frame.grid.clone();
        grid.num_symbols = window;
        out.push(CsiFrame { samples, grid });
        start += stride;
    }
    out
}

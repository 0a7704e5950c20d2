//! Self-referencing cross-correlation (SRCC) phase compensation.
//!
//! Clock asynchrony multiplies every CSI column by a unit-magnitude phasor
//! that no SISO receiver can measure directly. SRCC builds a reference CSI
//! from the measurement itself: transform each symbol's subcarrier vector to
//! the delay domain, apply a Gaussian window centered on the peak-energy bin
//! (boosting the dominant path, attenuating weak multipath), transform back,
//! and conjugate-multiply with the raw CSI. The reference shares the raw
//! CSI's clock phasor, so the product cancels it while preserving the linear
//! delay/Doppler structure of the dynamic terms.
//!
//! Cancellation is algebraically exact when the timing offset shifts the
//! impulse response by a whole number of delay bins (a timing offset is a
//! common delay on all paths, and integer-bin shifts commute with the
//! peak-centered window). Fractional-bin offsets leave a small residual from
//! the window/shift commutator; see the characterization tests.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{dft_unitary, idft_unitary};
use crate::sim::CsiFrame;

/// Delay-domain impulse response of one OFDM symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CirProfile {
    /// Complex taps over delay bins (length = IFFT size).
    pub taps: Vec<Complex64>,
    /// Seconds per delay bin: `1 / (ifft_size * mean subcarrier spacing)`.
    pub bin_spacing: f64,
}

/// Gaussian window parameters for the reference reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    /// Window width in delay bins.
    pub sigma: f64,
    /// Zero-padded IFFT length (>= subcarrier count).
    pub ifft_size: usize,
}

impl WindowSpec {
    pub fn new(sigma: f64, ifft_size: usize) -> Self {
        assert!(sigma > 0.0, "sigma must be positive");
        Self { sigma, ifft_size }
    }

    fn check_frame(&self, frame: &CsiFrame) -> Result<()> {
        if self.ifft_size < frame.num_subcarriers() {
            return Err(Error::DimensionMismatch(format!(
                "ifft_size {} smaller than subcarrier count {}",
                self.ifft_size,
                frame.num_subcarriers()
            )));
        }
        Ok(())
    }
}

/// How the window center is chosen across a CPI.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PeakMode {
    /// Independent peak per symbol (default).
    #[default]
    PerSymbol,
    /// Median of the per-symbol peaks, shared by the whole CPI; more robust
    /// to per-symbol noise when the channel is slowly varying.
    CpiMedian,
}

/// Cross-correlation output `dCSI = CSI .* conj(reference)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SrccMatrix {
    pub values: Array2<Complex64>,
}

impl SrccMatrix {
    pub fn num_subcarriers(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_symbols(&self) -> usize {
        self.values.ncols()
    }
}

/// Delay-domain CIR of symbol `j`: unitary IDFT of the column zero-padded to
/// the configured IFFT size. Parseval energy is preserved exactly.
pub fn cir_from_symbol(frame: &CsiFrame, j: usize, spec: &WindowSpec) -> Result<CirProfile> {
    spec.check_frame(frame)?;
    let m = frame.num_symbols();
    if j >= m {
        return Err(Error::IndexOutOfRange { index: j, len: m });
    }
    let n = frame.num_subcarriers();
    let mut padded = vec![Complex64::new(0.0, 0.0); spec.ifft_size];
    for (i, slot) in padded.iter_mut().enumerate().take(n) {
        *slot = frame.samples[(i, j)];
    }
    let taps = idft_unitary(&padded);
    Ok(CirProfile {
        taps,
        bin_spacing: 1.0 / (spec.ifft_size as f64 * frame.grid.mean_spacing()),
    })
}

/// Index of the maximum-energy tap; ties break toward the smallest index.
pub fn peak_bin(cir: &CirProfile) -> Result<usize> {
    assert!(!cir.taps.is_empty(), "profile must be nonempty");
    let mut best = 0usize;
    let mut best_e = 0.0f64;
    for (k, t) in cir.taps.iter().enumerate() {
        let e = t.norm_sqr();
        if e > best_e {
            best = k;
            best_e = e;
        }
    }
    if best_e == 0.0 {
        return Err(Error::AllZeroProfile);
    }
    Ok(best)
}

/// Gaussian window `exp(-(d / (2 sigma))^2)` over circular bin distance `d`
/// from `center`. Circular distance because a timing offset shifts the CIR
/// cyclically and the peak may sit near the edge of the grid.
pub fn gaussian_window(center: usize, spec: &WindowSpec) -> Vec<f64> {
    let k = spec.ifft_size;
    assert!(center < k, "center must lie inside the grid");
    (0..k)
        .map(|n| {
            let d = (n as i64 - center as i64).unsigned_abs() as f64;
            let d = d.min(k as f64 - d);
            (-(d / (2.0 * spec.sigma)).powi(2)).exp()
        })
        .collect()
}

fn reconstruct_columns(frame: &CsiFrame, spec: &WindowSpec, mode: PeakMode) -> Result<Array2<Complex64>> {
    spec.check_frame(frame)?;
    let n = frame.num_subcarriers();
    let m = frame.num_symbols();

    let mut cirs = Vec::with_capacity(m);
    let mut peaks = Vec::with_capacity(m);
    for j in 0..m {
        let cir = cir_from_symbol(frame, j, spec)?;
        peaks.push(peak_bin(&cir)?);
        cirs.push(cir);
    }
    if mode == PeakMode::CpiMedian {
        let mut sorted = peaks.clone();
        sorted.sort_unstable();
        let med = sorted[sorted.len() / 2];
        peaks.iter_mut().for_each(|p| *p = med);
    }

    let mut out = Array2::<Complex64>::zeros((n, m));
    for j in 0..m {
        let window = gaussian_window(peaks[j], spec);
        let windowed: Vec<Complex64> = cirs[j]
            .taps
            .iter()
            .zip(window.iter())
            .map(|(t, w)| t * w)
            .collect();
        let spectrum = dft_unitary(&windowed);
        for i in 0..n {
            out[(i, j)] = spectrum[i];
        }
    }
    Ok(out)
}

/// Energy-adjusted reference CSI: per symbol, window the CIR around its peak
/// bin and transform back, truncated to the N subcarrier points.
pub fn reconstruct_csi(frame: &CsiFrame, spec: &WindowSpec) -> Result<CsiFrame> {
    reconstruct_csi_with_mode(frame, spec, PeakMode::PerSymbol)
}

pub fn reconstruct_csi_with_mode(frame: &CsiFrame, spec: &WindowSpec, mode: PeakMode) -> Result<CsiFrame> {
    Ok(CsiFrame {
        samples: reconstruct_columns(frame, spec, mode)?,
        grid: frame.grid.clone(),
    })
}

/// Self-referencing cross-correlation: `dCSI[i][j] = CSI[i][j] * conj(ref[i][j])`.
pub fn srcc(frame: &CsiFrame, spec: &WindowSpec) -> Result<SrccMatrix> {
    srcc_with_mode(frame, spec, PeakMode::PerSymbol)
}

pub fn srcc_with_mode(frame: &CsiFrame, spec: &WindowSpec, mode: PeakMode) -> Result<SrccMatrix> {
    let recon = reconstruct_columns(frame, spec, mode)?;
    let mut values = frame.samples.clone();
    values.zip_mut_with(&recon, |v, r| *v *= r.conj());
    Ok(SrccMatrix { values })
}

/// Lower bound on the phase variance of the reconstructed CSI under additive
/// complex Gaussian noise of power `noise_power`:
/// `eta^2 / (2 * || window .* cir ||^2)`.
pub fn crlb_phase_bound(cir: &CirProfile, window: &[f64], noise_power: f64) -> Result<f64> {
    assert!(noise_power > 0.0, "noise power must be positive");
    if window.len() != cir.taps.len() {
        return Err(Error::DimensionMismatch(format!(
            "window length {} vs CIR length {}",
            window.len(),
            cir.taps.len()
        )));
    }
    let energy: f64 = cir
        .taps
        .iter()
        .zip(window.iter())
        .map(|(t, w)| (t * w).norm_sqr())
        .sum();
    if energy == 0.0 {
        return Err(Error::ZeroWindowedEnergy);
    }
    Ok(noise_power / (2.0 * energy))
}

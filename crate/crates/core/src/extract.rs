//! Delay-Doppler feature extraction via delay-domain MVDR beamforming.
//!
//! Per coherent processing interval (CPI):
//!
//! 1. subtract the per-subcarrier temporal mean of the cross-correlated CSI
//!    (static clutter) and normalize by it,
//! 2. concatenate the dynamic matrix with its conjugate — the two dynamic
//!    cross-terms are conjugate mirrors of each other, and keeping both lets
//!    the beamformer align them coherently while the non-symmetric
//!    by-product term mis-aligns and is attenuated,
//! 3. forward-backward smooth the covariance and regularize,
//! 4. steer an MVDR (Capon) beam to every candidate relative delay,
//! 5. Doppler-FFT each beamformed series and stack magnitudes into a
//!    delay-Doppler map; maps stack over CPIs into the feature tensor.
//!
//! The conjugate augmentation makes the delay response even in delay, so the
//! search runs over nonnegative delays only.

use ndarray::{Array1, Array2, Array3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fftshift, idft_unitary};
use crate::linalg::{condition_estimate, Cholesky};
use crate::sim::CsiFrame;
use crate::srcc::{srcc_with_mode, PeakMode, SrccMatrix, WindowSpec};
use crate::SPEED_OF_LIGHT;

/// Static-removed, static-normalized dynamic component W with its reference.
#[derive(Debug, Clone)]
pub struct DynamicMatrix {
    /// `W[i][j] = (dCSI[i][j] - U[i]) / U[i]`.
    pub values: Array2<Complex64>,
    /// Per-subcarrier temporal mean U of the cross-correlated CSI.
    pub static_mean: Array1<Complex64>,
}

/// Conjugate-augmented observation matrix `[W | conj(W)]`, N x 2M.
#[derive(Debug, Clone)]
pub struct ObservationMatrix {
    pub values: Array2<Complex64>,
}

impl ObservationMatrix {
    pub fn num_subcarriers(&self) -> usize {
        self.values.nrows()
    }

    /// Symbol count M of the un-augmented block.
    pub fn num_symbols(&self) -> usize {
        self.values.ncols() / 2
    }
}

/// Candidate relative delays for the beamforming search.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayGrid {
    /// Relative delays (s), nonnegative and strictly increasing.
    pub delays: Vec<f64>,
}

impl DelayGrid {
    pub fn new(delays: Vec<f64>) -> Result<Self> {
        if delays.is_empty() {
            return Err(Error::EmptyInput("delay grid".into()));
        }
        if delays[0] < 0.0 || !delays.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidConfig(
                "delays must be nonnegative and strictly increasing".into(),
            ));
        }
        Ok(Self { delays })
    }

    /// Grid over `[start_m, stop_m)` in steps of `step_m`, expressed in
    /// excess-range meters and converted internally via the speed of light.
    pub fn from_range_meters(start_m: f64, stop_m: f64, step_m: f64) -> Result<Self> {
        if !step_m.is_finite() || step_m <= 0.0 || stop_m <= start_m {
            return Err(Error::InvalidConfig("need stop > start and positive step".into()));
        }
        let mut delays = Vec::new();
        let mut r = start_m;
        while r < stop_m - 1e-9 {
            delays.push(r / SPEED_OF_LIGHT);
            r += step_m;
        }
        Self::new(delays)
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    /// The grid as excess range in meters.
    pub fn as_range_meters(&self) -> Vec<f64> {
        self.delays.iter().map(|&t| t * SPEED_OF_LIGHT).collect()
    }
}

/// Steering matrix: column l holds `exp(-j 2 pi f_n dtau_l)` over subcarriers.
#[derive(Debug, Clone)]
pub struct SteeringMatrix {
    pub values: Array2<Complex64>,
    pub grid: DelayGrid,
}

/// Forward-backward smoothed, diagonally loaded covariance.
#[derive(Debug, Clone)]
pub struct SmoothedCovariance {
    pub values: Array2<Complex64>,
    /// Diagonal loading that was added.
    pub epsilon: f64,
}

impl SmoothedCovariance {
    /// Largest |R - R^H| entry.
    pub fn hermitian_defect(&self) -> f64 {
        crate::linalg::hermitian_defect(&self.values)
    }

    /// Smallest-eigenvalue estimate via inverse power iteration.
    /// Errors if the matrix fails its Cholesky factorization.
    pub fn min_eigenvalue_estimate(&self) -> Result<f64> {
        let chol = Cholesky::new(&self.values)?;
        let n = self.values.nrows();
        let mut v = Array1::from_shape_fn(n, |i| {
            Complex64::new(1.0, if i % 2 == 0 { 0.25 } else { -0.5 })
        });
        let mut growth = 0.0f64;
        for _ in 0..40 {
            let w = chol.solve(&v);
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Ok(0.0);
            }
            growth = norm;
            v = w.mapv(|z| z / norm);
        }
        Ok(1.0 / growth)
    }
}

/// Magnitude spectrum with its frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerSpectrum {
    pub magnitudes: Vec<f64>,
    pub axis_hz: Vec<f64>,
}

/// One CPI's delay-Doppler magnitude map.
#[derive(Debug, Clone)]
pub struct DelayDopplerFrame {
    /// magnitudes[(delay_bin, doppler_bin)].
    pub magnitudes: Array2<f64>,
    pub doppler_axis: Vec<f64>,
    pub grid: DelayGrid,
}

/// Delay-Doppler maps stacked over CPIs.
#[derive(Debug, Clone)]
pub struct FeatureTensor {
    /// data[(delay_bin, doppler_bin, cpi)].
    pub data: Array3<f64>,
    pub delay_grid: DelayGrid,
    pub doppler_axis: Vec<f64>,
    /// Start time of each CPI (s).
    pub cpi_times: Vec<f64>,
    /// Stride between CPI starts (symbols).
    pub cpi_stride: usize,
}

/// Delay-compressed Doppler-time map.
#[derive(Debug, Clone)]
pub struct DopplerTimeMap {
    /// magnitudes[(doppler_bin, cpi)].
    pub magnitudes: Array2<f64>,
    pub doppler_axis: Vec<f64>,
    pub cpi_times: Vec<f64>,
}

/// Delay/Doppler location of a map peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakEstimate {
    pub delay_bin: usize,
    pub doppler_bin: usize,
    pub delay_s: f64,
    pub range_m: f64,
    pub doppler_hz: f64,
}

/// Extraction parameters. Defaults follow the Wi-Fi-like 20 MHz / 1 kHz
/// operating point: 128-bin IFFT with sigma = 64, 32 delay bins over
/// [0, 32) m at 1 m, Doppler cropped to +-150 Hz, CPIs of 128 symbols
/// advancing by 32.
#[derive(Debug, Clone)]
pub struct ExtractConfig {
    pub window: WindowSpec,
    pub peak_mode: PeakMode,
    /// Relative diagonal loading: epsilon = epsilon_scale * trace(R_fb) / N.
    pub epsilon_scale: f64,
    /// Doppler crop range (Hz), inclusive.
    pub doppler_crop: (f64, f64),
    /// Doppler bins on each side of DC excluded from peak searches.
    pub dc_exclusion_bins: usize,
    /// CPI length (symbols).
    pub cpi_symbols: usize,
    /// CPI stride (symbols).
    pub cpi_stride: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            window: WindowSpec::new(64.0, 128),
            peak_mode: PeakMode::PerSymbol,
            epsilon_scale: 1e-3,
            doppler_crop: (-150.0, 150.0),
            dc_exclusion_bins: 2,
            cpi_symbols: 128,
            cpi_stride: 32,
        }
    }
}

/// Per-subcarrier arithmetic mean of the cross-correlated CSI over the CPI.
pub fn static_mean(srcc: &SrccMatrix) -> Array1<Complex64> {
    let (n, m) = srcc.values.dim();
    let mut mean = Array1::<Complex64>::zeros(n);
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            acc += srcc.values[(i, j)];
        }
        mean[i] = acc / m as f64;
    }
    mean
}

/// Subtract and normalize by the static mean: `W = (dCSI - U) / U`.
///
/// Fails with [`Error::NearZeroStaticMean`] when some `|U_i|` falls below
/// `1e-12 x` the matrix RMS — no usable static reference on that subcarrier.
pub fn dynamic_component(srcc: &SrccMatrix) -> Result<DynamicMatrix> {
    let (n, m) = srcc.values.dim();
    let mean = static_mean(srcc);
    let rms = (srcc.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * m) as f64).sqrt();
    let floor = 1e-12 * rms;
    for (i, u) in mean.iter().enumerate() {
        if u.norm() <= floor {
            return Err(Error::NearZeroStaticMean { subcarrier: i });
        }
    }
    let mut values = Array2::<Complex64>::zeros((n, m));
    for i in 0..n {
        let u = mean[i];
        for j in 0..m {
            values[(i, j)] = (srcc.values[(i, j)] - u) / u;
        }
    }
    Ok(DynamicMatrix { values, static_mean: mean })
}

/// Conjugate augmentation: `Lambda = [W | conj(W)]`.
pub fn build_observation(dyn_matrix: &DynamicMatrix) -> ObservationMatrix {
    let (n, m) = dyn_matrix.values.dim();
    let mut values = Array2::<Complex64>::zeros((n, 2 * m));
    for i in 0..n {
        for j in 0..m {
            let w = dyn_matrix.values[(i, j)];
            values[(i, j)] = w;
            values[(i, m + j)] = w.conj();
        }
    }
    ObservationMatrix { values }
}

/// Steering matrix over the delay grid for the given subcarrier frequencies.
pub fn steering_matrix(grid: &DelayGrid, frequencies: &[f64]) -> SteeringMatrix {
    let n = frequencies.len();
    let l = grid.len();
    let mut values = Array2::<Complex64>::zeros((n, l));
    for (col, &dtau) in grid.delays.iter().enumerate() {
        for (row, &f) in frequencies.iter().enumerate() {
            values[(row, col)] = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * dtau);
        }
    }
    SteeringMatrix { values, grid: grid.clone() }
}

/// Forward-backward smoothed covariance `R + J R J + eps I` with the
/// exchange matrix J (flipped identity). `eps > 0` guarantees invertibility.
pub fn smoothed_covariance(obs: &ObservationMatrix, epsilon: f64) -> SmoothedCovariance {
    assert!(epsilon > 0.0, "regularization must be positive");
    let n = obs.values.nrows();
    let lam = &obs.values;
    let mut r = Array2::<Complex64>::zeros((n, n));
    // R = Lambda Lambda^H, lower triangle then mirror.
    for i in 0..n {
        for j in 0..=i {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..lam.ncols() {
                acc += lam[(i, k)] * lam[(j, k)].conj();
            }
            r[(i, j)] = acc;
            r[(j, i)] = acc.conj();
        }
    }
    // J R J flips both indices.
    let mut values = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            values[(i, j)] = r[(i, j)] + r[(n - 1 - i, n - 1 - j)];
        }
    }
    for i in 0..n {
        values[(i, i)] += Complex64::new(epsilon, 0.0);
    }
    SmoothedCovariance { values, epsilon }
}

/// Relative diagonal loading for a covariance: `scale * trace(R_fb) / N`,
/// with an absolute floor so an all-zero observation still inverts.
pub fn relative_epsilon(obs: &ObservationMatrix, scale: f64) -> f64 {
    let n = obs.values.nrows();
    let lam = &obs.values;
    let mut trace = 0.0;
    for i in 0..n {
        for k in 0..lam.ncols() {
            trace += lam[(i, k)].norm_sqr();
        }
    }
    let eps = scale * 2.0 * trace / n as f64; // forward + backward double the trace
    if eps > 0.0 {
        eps
    } else {
        1e-12
    }
}

const CONDITION_LIMIT: f64 = 1e12;

/// MVDR (Capon) weights for one steering vector:
/// `w = R^{-1} a / (a^H R^{-1} a)`, distortionless by construction.
///
/// Fails if the covariance is not positive definite or if its estimated
/// condition number exceeds 1e12 (reported, not silently regularized).
pub fn mvdr_weights(cov: &SmoothedCovariance, steering: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    let n = cov.values.nrows();
    if steering.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "steering length {} vs covariance size {n}",
            steering.len()
        )));
    }
    let chol = Cholesky::new(&cov.values)?;
    let cond = condition_estimate(&cov.values, &chol);
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned { cond });
    }
    let x = chol.solve(steering);
    let denom: Complex64 = steering.iter().zip(x.iter()).map(|(a, v)| a.conj() * v).sum();
    if denom.norm() == 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(x.mapv(|v| v / denom))
}

/// Apply weights separately to the original and conjugate halves of the
/// observation matrix and sum: `X_j = w^H W[:,j] + w^H conj(W)[:,j]`.
pub fn beamform(obs: &ObservationMatrix, weights: &Array1<Complex64>) -> Array1<Complex64> {
    let n = obs.num_subcarriers();
    let m = obs.num_symbols();
    assert_eq!(weights.len(), n, "weight length must match subcarriers");
    let mut out = Array1::<Complex64>::zeros(m);
    for j in 0..m {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc += weights[i].conj() * (obs.values[(i, j)] + obs.values[(i, m + j)]);
        }
        out[j] = acc;
    }
    out
}

/// Doppler spectrum of a beamformed symbol series.
///
/// The analysis kernel is conjugate-matched to the `exp(-j 2 pi f t)` phasor
/// convention used by the channel model, so a path with Doppler `+f` peaks at
/// `+f` on the axis. The full M-point transform is computed, fft-shifted to a
/// symmetric axis, then cropped to `crop` (inclusive).
pub fn doppler_spectrum(
    series: &[Complex64],
    sample_rate: f64,
    crop: (f64, f64),
) -> Result<DopplerSpectrum> {
    let m = series.len();
    if m < 2 {
        return Err(Error::EmptyInput("doppler series needs at least 2 samples".into()));
    }
    let nyquist = sample_rate / 2.0;
    if crop.0 > crop.1 || crop.0 < -nyquist - 1e-9 || crop.1 > nyquist + 1e-9 {
        return Err(Error::CropExceedsNyquist { lo: crop.0, hi: crop.1, nyquist_hz: nyquist });
    }
    let spectrum = fftshift(&idft_unitary(series));
    let step = sample_rate / m as f64;
    let half = (m / 2) as i64;
    let mut magnitudes = Vec::new();
    let mut axis_hz = Vec::new();
    for (k, v) in spectrum.iter().enumerate() {
        let f = (k as i64 - half) as f64 * step;
        if f >= crop.0 - 1e-9 && f <= crop.1 + 1e-9 {
            magnitudes.push(v.norm());
            axis_hz.push(f);
        }
    }
    Ok(DopplerSpectrum { magnitudes, axis_hz })
}

fn extract_frame_impl(
    srcc: &SrccMatrix,
    grid: &DelayGrid,
    frequencies: &[f64],
    sample_rate: f64,
    config: &ExtractConfig,
    mvdr: bool,
) -> Result<DelayDopplerFrame> {
    let dyn_matrix = dynamic_component(srcc)?;
    let obs = build_observation(&dyn_matrix);
    let eps = relative_epsilon(&obs, config.epsilon_scale);
    let cov = smoothed_covariance(&obs, eps);
    let steering = steering_matrix(grid, frequencies);
    let n = obs.num_subcarriers();

    // One factorization and condition check serve every delay bin; the
    // per-bin work is then two triangular solves.
    let factor = if mvdr {
        let chol = Cholesky::new(&cov.values)?;
        let cond = condition_estimate(&cov.values, &chol);
        if cond > CONDITION_LIMIT {
            return Err(Error::IllConditioned { cond });
        }
        Some(chol)
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    let mut axis: Option<Vec<f64>> = None;
    for l in 0..grid.len() {
        let a = steering.values.column(l).to_owned();
        let w = if let Some(chol) = &factor {
            let x = chol.solve(&a);
            let denom: Complex64 = a.iter().zip(x.iter()).map(|(ai, xi)| ai.conj() * xi).sum();
            if denom.norm() == 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            x.mapv(|v| v / denom)
        } else {
            a.mapv(|v| v / n as f64)
        };
        let series = beamform(&obs, &w);
        let spec = doppler_spectrum(series.as_slice().unwrap(), sample_rate, config.doppler_crop)?;
        if axis.is_none() {
            axis = Some(spec.axis_hz);
        }
        rows.push(spec.magnitudes);
    }
    let axis = axis.expect("grid is nonempty");
    let mut magnitudes = Array2::<f64>::zeros((grid.len(), axis.len()));
    for (l, row) in rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            magnitudes[(l, k)] = v;
        }
    }
    Ok(DelayDopplerFrame { magnitudes, doppler_axis: axis, grid: grid.clone() })
}

/// Full MVDR extraction of one CPI: dynamic separation, conjugate
/// augmentation, smoothed covariance, per-delay MVDR weights, beamforming,
/// Doppler FFT. One map row per delay bin.
pub fn extract_frame(
    srcc: &SrccMatrix,
    grid: &DelayGrid,
    frequencies: &[f64],
    sample_rate: f64,
    config: &ExtractConfig,
) -> Result<DelayDopplerFrame> {
    if srcc.num_subcarriers() != frequencies.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} subcarriers vs {} frequencies",
            srcc.num_subcarriers(),
            frequencies.len()
        )));
    }
    extract_frame_impl(srcc, grid, frequencies, sample_rate, config, true)
}

/// Plain matched-filter variant (`w = a / N`): the conventional
/// delay-FFT x Doppler-FFT path used when comparing against baseline
/// phase-removal methods without adaptive smoothing.
pub fn extract_frame_matched(
    srcc: &SrccMatrix,
    grid: &DelayGrid,
    frequencies: &[f64],
    sample_rate: f64,
    config: &ExtractConfig,
) -> Result<DelayDopplerFrame> {
    extract_frame_impl(srcc, grid, frequencies, sample_rate, config, false)
}

/// Extract a delay-Doppler frame per CPI and stack along time.
pub fn extract_tensor(cpis: &[CsiFrame], grid: &DelayGrid, config: &ExtractConfig) -> Result<FeatureTensor> {
    if cpis.is_empty() {
        return Err(Error::EmptyInput("need at least one CPI".into()));
    }
    let reference = &cpis[0].grid;
    let mut maps = Vec::with_capacity(cpis.len());
    for cpi in cpis {
        if cpi.grid.frequencies != reference.frequencies
            || cpi.grid.symbol_interval != reference.symbol_interval
        {
            return Err(Error::GridMismatch);
        }
        let d = srcc_with_mode(cpi, &config.window, config.peak_mode)?;
        maps.push(extract_frame(
            &d,
            grid,
            &cpi.grid.frequencies,
            cpi.grid.sample_rate(),
            config,
        )?);
    }
    let (ld, lf) = maps[0].magnitudes.dim();
    let mut data = Array3::<f64>::zeros((ld, lf, maps.len()));
    for (t, map) in maps.iter().enumerate() {
        if map.magnitudes.dim() != (ld, lf) || map.doppler_axis != maps[0].doppler_axis {
            return Err(Error::DimensionMismatch("CPI maps have inconsistent axes".into()));
        }
        for d in 0..ld {
            for f in 0..lf {
                data[(d, f, t)] = map.magnitudes[(d, f)];
            }
        }
    }
    let dt = reference.symbol_interval;
    Ok(FeatureTensor {
        data,
        delay_grid: grid.clone(),
        doppler_axis: maps[0].doppler_axis.clone(),
        cpi_times: (0..maps.len()).map(|t| (t * config.cpi_stride) as f64 * dt).collect(),
        cpi_stride: config.cpi_stride,
    })
}

/// Sum the tensor over the delay axis, yielding the Doppler-time map.
pub fn compress_delay(tensor: &FeatureTensor) -> DopplerTimeMap {
    let (ld, lf, lt) = tensor.data.dim();
    let mut magnitudes = Array2::<f64>::zeros((lf, lt));
    for d in 0..ld {
        for f in 0..lf {
            for t in 0..lt {
                magnitudes[(f, t)] += tensor.data[(d, f, t)];
            }
        }
    }
    DopplerTimeMap {
        magnitudes,
        doppler_axis: tensor.doppler_axis.clone(),
        cpi_times: tensor.cpi_times.clone(),
    }
}

/// Argmax of a delay-Doppler map outside the DC band (`dc_exclusion_bins`
/// Doppler bins on each side of 0 Hz are skipped, rejecting static residue).
/// Ties break toward smaller delay, then smaller |Doppler|.
pub fn estimate_peak(frame: &DelayDopplerFrame, dc_exclusion_bins: usize) -> Result<PeakEstimate> {
    let (ld, lf) = frame.magnitudes.dim();
    let step = if lf > 1 {
        frame.doppler_axis[1] - frame.doppler_axis[0]
    } else {
        1.0
    };
    let dc_limit = dc_exclusion_bins as f64 * step + 1e-9;
    let mut candidates: Vec<usize> = (0..lf)
        .filter(|&k| frame.doppler_axis[k].abs() > dc_limit)
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmptySearchRegion(
            "DC exclusion removed every doppler bin".into(),
        ));
    }
    // Scan order implements the tie-break: smaller delay first, then
    // smaller |doppler| within a delay.
    candidates.sort_by(|&a, &b| {
        frame.doppler_axis[a]
            .abs()
            .partial_cmp(&frame.doppler_axis[b].abs())
            .unwrap()
            .then(frame.doppler_axis[a].partial_cmp(&frame.doppler_axis[b]).unwrap())
    });
    let mut best: Option<(usize, usize, f64)> = None;
    for d in 0..ld {
        for &k in &candidates {
            let v = frame.magnitudes[(d, k)];
            if best.is_none_or(|(_, _, b)| v > b) {
                best = Some((d, k, v));
            }
        }
    }
    let (delay_bin, doppler_bin, peak) = best.expect("nonempty search region");
    if peak == 0.0 {
        return Err(Error::EmptySearchRegion("map is all zero".into()));
    }
    let delay_s = frame.grid.delays[delay_bin];
    Ok(PeakEstimate {
        delay_bin,
        doppler_bin,
        delay_s,
        range_m: delay_s * SPEED_OF_LIGHT,
        doppler_hz: frame.doppler_axis[doppler_bin],
    })
}

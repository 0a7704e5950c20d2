//! Evaluation metrics: range-error CDF percentiles and Doppler mirror ratio.

use crate::error::{Error, Result};

/// Cap applied when one side of the mirror ratio carries no energy.
pub const MIRROR_RATIO_CAP_DB: f64 = 120.0;

/// Sorted absolute range errors with interpolated percentiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentileTable {
    /// Absolute errors sorted ascending (m).
    pub sorted_errors: Vec<f64>,
    pub p50: f64,
    pub p70: f64,
}

impl PercentileTable {
    /// Linear-interpolation percentile over the sorted samples
    /// (rank = p/100 * (n-1)).
    pub fn percentile(&self, p: f64) -> f64 {
        percentile_of_sorted(&self.sorted_errors, p)
    }
}

fn percentile_of_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = (p / 100.0).clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Absolute-error CDF of (estimate, truth) range pairs, reporting the 50th
/// and 70th percentiles.
pub fn range_error_cdf(pairs: &[(f64, f64)]) -> Result<PercentileTable> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("range error pairs".into()));
    }
    let mut sorted_errors: Vec<f64> = pairs.iter().map(|(e, t)| (e - t).abs()).collect();
    sorted_errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p50 = percentile_of_sorted(&sorted_errors, 50.0);
    let p70 = percentile_of_sorted(&sorted_errors, 70.0);
    Ok(PercentileTable { sorted_errors, p50, p70 })
}

/// Power ratio (dB) between the spectrum bins nearest `+f_true` and
/// `-f_true`; positive means the correct side dominates. `magnitudes` are
/// linear magnitudes, so power is their square. A zero-energy side caps the
/// result at +-[`MIRROR_RATIO_CAP_DB`].
pub fn mirror_ratio(magnitudes: &[f64], axis_hz: &[f64], f_true: f64) -> Result<f64> {
    if magnitudes.len() != axis_hz.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} magnitudes vs {} axis points",
            magnitudes.len(),
            axis_hz.len()
        )));
    }
    let plus = crate::geometry::doppler_to_bin(f_true, axis_hz)?;
    let minus = crate::geometry::doppler_to_bin(-f_true, axis_hz)?;
    let p_plus = magnitudes[plus] * magnitudes[plus];
    let p_minus = magnitudes[minus] * magnitudes[minus];
    Ok(match (p_plus > 0.0, p_minus > 0.0) {
        (true, true) => (10.0 * (p_plus / p_minus).log10()).clamp(-MIRROR_RATIO_CAP_DB, MIRROR_RATIO_CAP_DB),
        (true, false) => MIRROR_RATIO_CAP_DB,
        (false, true) => -MIRROR_RATIO_CAP_DB,
        (false, false) => 0.0,
    })
}

//! Structured-text evaluation report: one `key=value` per line, so any
//! language can parse it without a serialization library.

use crate::bench::LatencyStats;
use crate::error::{Error, Result};
use crate::metrics::PercentileTable;

/// Evaluation summary over a tensor's CPIs.
#[derive(Debug, Clone)]
pub struct EvalReport {
    /// Per-CPI (estimated, truth) excess range (m).
    pub range_pairs: Vec<(f64, f64)>,
    /// Per-CPI (estimated, truth) Doppler (Hz).
    pub doppler_pairs: Vec<(f64, f64)>,
    pub percentiles: PercentileTable,
    /// Mirror-suppression ratios (dB), one per CPI.
    pub mirror_db: Vec<f64>,
    pub latency: Option<LatencyStats>,
}

impl EvalReport {
    pub fn validate(&self) -> Result<()> {
        if self.range_pairs.is_empty() {
            return Err(Error::EmptyInput("evaluation pairs".into()));
        }
        if self.percentiles.p70 < self.percentiles.p50 {
            return Err(Error::InvalidConfig("percentiles must be monotone".into()));
        }
        if let Some(lat) = &self.latency {
            if !lat.mean_ms.is_finite() || lat.mean_ms <= 0.0 || lat.samples_ms.iter().any(|&s| s <= 0.0) {
                return Err(Error::InvalidConfig("latencies must be positive".into()));
            }
        }
        Ok(())
    }

    /// Render as key=value lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        push("cpi_count", self.range_pairs.len().to_string());
        for (k, ((est_r, tru_r), (est_f, tru_f))) in
            self.range_pairs.iter().zip(self.doppler_pairs.iter()).enumerate()
        {
            push(&format!("cpi.{k}.est_range_m"), format!("{est_r:.4}"));
            push(&format!("cpi.{k}.truth_range_m"), format!("{tru_r:.4}"));
            push(&format!("cpi.{k}.est_doppler_hz"), format!("{est_f:.4}"));
            push(&format!("cpi.{k}.truth_doppler_hz"), format!("{tru_f:.4}"));
        }
        push("range_error_p50_m", format!("{:.4}", self.percentiles.p50));
        push("range_error_p70_m", format!("{:.4}", self.percentiles.p70));
        for (k, db) in self.mirror_db.iter().enumerate() {
            push(&format!("mirror.{k}.db"), format!("{db:.2}"));
        }
        if let Some(lat) = &self.latency {
            push("latency_mean_ms", format!("{:.4}", lat.mean_ms));
            push("latency_std_ms", format!("{:.4}", lat.std_ms));
            push("latency_median_ms", format!("{:.4}", lat.median_ms));
            push("latency_samples", lat.samples_ms.len().to_string());
        }
        out
    }
}

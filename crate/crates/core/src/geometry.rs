//! Bistatic Doppler geometry and physically motivated feature augmentation.
//!
//! The Doppler velocity of a moving target observed by a separated
//! transmitter/receiver pair is the projection of its velocity onto the sum
//! of the unit vectors pointing away from each end:
//!
//! ```text
//! vD = v . ( unit(P - P_tx) + unit(P - P_rx) ),     fD = vD * fc / c
//! ```
//!
//! Changing target location, heading, speed, gesture onset or noise floor
//! maps onto translations, scalings, mirroring, time shifts and noise
//! injection of the Doppler-time representation; [`augment_map`] and
//! [`augment_tensor`] implement exactly those five transforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::extract::{DopplerTimeMap, FeatureTensor};
use crate::SPEED_OF_LIGHT;

/// Planar bistatic layout: transmitter, receiver, target position/velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistaticGeometry {
    /// Transmitter position (m).
    pub tx: [f64; 2],
    /// Receiver position (m).
    pub rx: [f64; 2],
    /// Target position (m).
    pub target: [f64; 2],
    /// Target velocity (m/s).
    pub velocity: [f64; 2],
    /// Carrier frequency (Hz).
    pub carrier: f64,
}

impl BistaticGeometry {
    pub fn validate(&self) -> Result<()> {
        for v in self.tx.iter().chain(&self.rx).chain(&self.target).chain(&self.velocity) {
            if !v.is_finite() {
                return Err(Error::InvalidScene("geometry coordinates must be finite".into()));
            }
        }
        let close = |a: [f64; 2], b: [f64; 2]| {
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() < 1e-12
        };
        if close(self.target, self.tx) || close(self.target, self.rx) {
            return Err(Error::CoincidentPoints);
        }
        if !self.carrier.is_finite() || self.carrier <= 0.0 {
            return Err(Error::InvalidScene("carrier frequency must be positive".into()));
        }
        Ok(())
    }
}

fn unit_from(to: [f64; 2], from: [f64; 2]) -> [f64; 2] {
    let d = [to[0] - from[0], to[1] - from[1]];
    let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
    [d[0] / n, d[1] / n]
}

/// Doppler velocity vD (m/s) of the target.
pub fn doppler_velocity(geom: &BistaticGeometry) -> Result<f64> {
    geom.validate()?;
    let ut = unit_from(geom.target, geom.tx);
    let ur = unit_from(geom.target, geom.rx);
    Ok(geom.velocity[0] * (ut[0] + ur[0]) + geom.velocity[1] * (ut[1] + ur[1]))
}

/// Doppler frequency shift fD = vD * fc / c (Hz).
pub fn doppler_shift_hz(geom: &BistaticGeometry) -> Result<f64> {
    Ok(doppler_velocity(geom)? * geom.carrier / SPEED_OF_LIGHT)
}

/// One of the five spectrogram augmentations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AugmentKind {
    /// Shift along the Doppler axis by a signed number of bins, zero-filled.
    Translate,
    /// Resample the Doppler axis by a factor (tone at f moves to s*f).
    AffineScale,
    /// Reverse the Doppler axis about 0 Hz (motion direction flip).
    Mirror,
    /// Shift along the CPI (time) axis by a signed number of frames, zero-filled.
    TimeShift,
    /// Add Gaussian noise of the given power to magnitudes, clipped at zero.
    Noise,
}

/// Augmentation request: kind, kind-specific magnitude, RNG seed (noise only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentationSpec {
    pub kind: AugmentKind,
    /// Translate/TimeShift: signed bin count. AffineScale: factor > 0.
    /// Noise: power (variance). Mirror: ignored.
    pub magnitude: f64,
    pub seed: u64,
}

impl AugmentationSpec {
    fn validate(&self) -> Result<()> {
        match self.kind {
            AugmentKind::AffineScale if !self.magnitude.is_finite() || self.magnitude <= 0.0 => Err(Error::InvalidAugmentation(
                "affine scale factor must be positive".into(),
            )),
            AugmentKind::Noise if self.magnitude < 0.0 => {
                Err(Error::InvalidAugmentation("noise power must be nonnegative".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Shift `row` by `bins`, filling vacated cells with zero.
fn shift_zero_fill(values: &[f64], bins: i64) -> Vec<f64> {
    let n = values.len() as i64;
    (0..n)
        .map(|k| {
            let src = k - bins;
            if src >= 0 && src < n {
                values[src as usize]
            } else {
                0.0
            }
        })
        .collect()
}

/// Resample a Doppler slice so content at frequency f lands at s*f,
/// using linear interpolation on the (uniform) axis.
fn scale_axis(values: &[f64], axis: &[f64], s: f64) -> Vec<f64> {
    let n = values.len();
    let lo = axis[0];
    let step = if n > 1 { axis[1] - axis[0] } else { 1.0 };
    (0..n)
        .map(|k| {
            let f_src = axis[k] / s;
            let pos = (f_src - lo) / step;
            if pos < 0.0 || pos > (n - 1) as f64 {
                return 0.0;
            }
            let i0 = pos.floor() as usize;
            let frac = pos - i0 as f64;
            if i0 + 1 < n {
                values[i0] * (1.0 - frac) + values[i0 + 1] * frac
            } else {
                values[i0]
            }
        })
        .collect()
}

/// Apply one augmentation to each Doppler column of a doppler x time matrix.
/// `rng` is shared across columns so a tensor consumes one noise stream.
fn augment_columns(
    mags: &ndarray::Array2<f64>,
    doppler_axis: &[f64],
    spec: &AugmentationSpec,
    rng: &mut ChaCha8Rng,
) -> ndarray::Array2<f64> {
    let (nf, nt) = mags.dim();
    let mut out = ndarray::Array2::<f64>::zeros((nf, nt));
    match spec.kind {
        AugmentKind::Translate => {
            let bins = spec.magnitude.round() as i64;
            for t in 0..nt {
                let col: Vec<f64> = (0..nf).map(|f| mags[(f, t)]).collect();
                let shifted = shift_zero_fill(&col, bins);
                for f in 0..nf {
                    out[(f, t)] = shifted[f];
                }
            }
        }
        AugmentKind::AffineScale => {
            for t in 0..nt {
                let col: Vec<f64> = (0..nf).map(|f| mags[(f, t)]).collect();
                let scaled = scale_axis(&col, doppler_axis, spec.magnitude);
                for f in 0..nf {
                    out[(f, t)] = scaled[f];
                }
            }
        }
        AugmentKind::Mirror => {
            // The axis is symmetric about 0 Hz, so reversal flips sign.
            for t in 0..nt {
                for f in 0..nf {
                    out[(f, t)] = mags[(nf - 1 - f, t)];
                }
            }
        }
        AugmentKind::TimeShift => {
            let bins = spec.magnitude.round() as i64;
            for f in 0..nf {
                let row: Vec<f64> = (0..nt).map(|t| mags[(f, t)]).collect();
                let shifted = shift_zero_fill(&row, bins);
                for t in 0..nt {
                    out[(f, t)] = shifted[t];
                }
            }
        }
        AugmentKind::Noise => {
            let sigma = spec.magnitude.sqrt();
            for f in 0..nf {
                for t in 0..nt {
                    let e: f64 = rng.sample(StandardNormal);
                    out[(f, t)] = (mags[(f, t)] + e * sigma).max(0.0);
                }
            }
        }
    }
    out
}

/// Augment a Doppler-time map. Output dimensions equal input dimensions.
pub fn augment_map(map: &DopplerTimeMap, spec: &AugmentationSpec) -> Result<DopplerTimeMap> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(DopplerTimeMap {
        magnitudes: augment_columns(&map.magnitudes, &map.doppler_axis, spec, &mut rng),
        doppler_axis: map.doppler_axis.clone(),
        cpi_times: map.cpi_times.clone(),
    })
}

/// Augment a delay-Doppler-time tensor: the same transform is applied to the
/// Doppler-time slice of every delay bin.
pub fn augment_tensor(tensor: &FeatureTensor, spec: &AugmentationSpec) -> Result<FeatureTensor> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (nd, nf, nt) = tensor.data.dim();
    let mut data = ndarray::Array3::<f64>::zeros((nd, nf, nt));
    for d in 0..nd {
        let slice = tensor.data.index_axis(ndarray::Axis(0), d).to_owned();
        let aug = augment_columns(&slice, &tensor.doppler_axis, spec, &mut rng);
        data.index_axis_mut(ndarray::Axis(0), d).assign(&aug);
    }
    Ok(FeatureTensor {
        data,
        delay_grid: tensor.delay_grid.clone(),
        doppler_axis: tensor.doppler_axis.clone(),
        cpi_times: tensor.cpi_times.clone(),
        cpi_stride: tensor.cpi_stride,
    })
}

/// Nearest axis bin for a frequency; ties resolve toward the lower frequency.
pub fn doppler_to_bin(freq_hz: f64, axis: &[f64]) -> Result<usize> {
    if axis.is_empty() {
        return Err(Error::EmptyInput("doppler axis".into()));
    }
    let lo = axis[0];
    let hi = axis[axis.len() - 1];
    if freq_hz < lo || freq_hz > hi {
        return Err(Error::FrequencyOutOfAxis { freq_hz, lo, hi });
    }
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (k, &f) in axis.iter().enumerate() {
        let d = (freq_hz - f).abs();
        // Strict '<' keeps the earlier (lower-frequency) bin on exact ties.
        if d < best_d - 1e-12 * (1.0 + d.abs()) {
            best = k;
            best_d = d;
        }
    }
    Ok(best)
}

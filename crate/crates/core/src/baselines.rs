//! Multi-antenna reference phase-removal methods: CACC and CASR.
//!
//! Both rely on clock phasors being identical across receive antennas:
//! CACC conjugate-multiplies the two antennas' CSI, CASR takes their ratio.
//! They exist here to reproduce the Doppler mirror-ambiguity contrast on
//! synthetic two-antenna scenes: CACC's conjugate product leaves near-equal
//! energy at +/- the target Doppler, whereas the SISO cross-correlation
//! pipeline suppresses the mirror via delay-domain beamforming.
//!
//! Baseline outputs are ordinary cross-correlation matrices, so they can be
//! pushed through the same extraction tail (dynamic separation onward) or
//! through the plain matched-filter path for a 2D-FFT-style comparison.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sim::{generate_csi, ClockImpairment, CsiFrame, PathScene};
use crate::srcc::SrccMatrix;

/// CSI of two receive antennas sharing one clock (identical impairments).
#[derive(Debug, Clone)]
pub struct DualAntennaFrame {
    pub antenna_a: CsiFrame,
    pub antenna_b: CsiFrame,
}

/// Companion scene for a second antenna of a half-wavelength pair: each
/// path's attenuation picks up `exp(-j pi cos(aoa))` with a random
/// angle-of-arrival per path. Magnitudes are untouched.
pub fn ula_companion_scene(scene: &PathScene, rng_seed: u64) -> PathScene {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = scene.clone();
    let mut rotate = |a: Complex64| -> Complex64 {
        let aoa = rng.gen::<f64>() * std::f64::consts::PI;
        a * Complex64::from_polar(1.0, -std::f64::consts::PI * aoa.cos())
    };
    for p in &mut out.static_paths {
        p.attenuation = rotate(p.attenuation);
    }
    for p in &mut out.dynamic_paths {
        p.attenuation = rotate(p.attenuation);
    }
    out
}

/// Simulate both antennas with one shared impairment (the CACC/CASR
/// premise). The same seed drives both noise draws, so identical scenes
/// produce bitwise-identical frames.
pub fn simulate_dual(
    scene_a: &PathScene,
    scene_b: &PathScene,
    shared_impairment: &ClockImpairment,
    rng_seed: u64,
) -> Result<DualAntennaFrame> {
    if scene_a.grid != scene_b.grid {
        return Err(Error::GridMismatch);
    }
    let mut a = scene_a.clone();
    let mut b = scene_b.clone();
    a.impairment = shared_impairment.clone();
    b.impairment = shared_impairment.clone();
    Ok(DualAntennaFrame {
        antenna_a: generate_csi(&a, rng_seed)?,
        antenna_b: generate_csi(&b, rng_seed)?,
    })
}

/// Cross-antenna cross-correlation: `CSI_A .* conj(CSI_B)`.
/// The shared clock phasor cancels exactly.
pub fn cacc(frame: &DualAntennaFrame) -> SrccMatrix {
    let mut values = frame.antenna_a.samples.clone();
    values.zip_mut_with(&frame.antenna_b.samples, |a, b| *a *= b.conj());
    SrccMatrix { values }
}

/// Cross-antenna signal ratio: `CSI_A ./ CSI_B`.
/// Cancels the shared clock phasor and any common gain scale. Fails with
/// [`Error::DivisorNearZero`] if some divisor magnitude drops below
/// `1e-12 x` the antenna-B RMS.
pub fn casr(frame: &DualAntennaFrame) -> Result<SrccMatrix> {
    let b = &frame.antenna_b.samples;
    let floor = 1e-12 * frame.antenna_b.rms();
    let (n, m) = b.dim();
    let mut values = frame.antenna_a.samples.clone();
    for i in 0..n {
        for j in 0..m {
            let d = b[(i, j)];
            if d.norm() <= floor {
                return Err(Error::DivisorNearZero { subcarrier: i, symbol: j });
            }
            values[(i, j)] /= d;
        }
    }
    Ok(SrccMatrix { values })
}

//! Bistatic SISO CSI sensing toolkit.
//!
//! A transmitter and receiver that do not share a clock leave every CSI
//! snapshot multiplied by a random per-symbol phasor (timing offset, carrier
//! frequency offset, hardware phase). This crate provides the full processing
//! chain that turns such distorted CSI into unambiguous delay-Doppler-time
//! features, together with a synthetic channel simulator that supplies exact
//! ground truth for every stage:
//!
//! * [`sim`] — synthetic bistatic SISO CSI with controllable multipath and
//!   clock impairments,
//! * [`srcc`] — self-referencing cross-correlation: delay-domain Gaussian
//!   windowing reconstructs an energy-adjusted reference CSI that shares the
//!   clock phasor of the raw CSI, so their conjugate product cancels it,
//! * [`extract`] — dynamic-component separation, conjugate-augmented
//!   delay-domain MVDR beamforming with forward-backward smoothing, Doppler
//!   FFT, and delay-Doppler-time tensor assembly,
//! * [`baselines`] — the classic two-antenna CACC and CASR phase-removal
//!   methods, used to reproduce the Doppler mirror-ambiguity contrast,
//! * [`geometry`] — bistatic Doppler-velocity projection and the physically
//!   motivated spectrogram augmentations,
//! * [`io`] — binary CSI/tensor file formats, TOML scene configuration,
//!   spectrogram export and the key=value evaluation report,
//! * [`metrics`] — range-error CDF and mirror-suppression ratio,
//! * [`bench`] — single-threaded latency measurement of the extraction core.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod extract;
mod fft;
pub mod geometry;
pub mod io;
mod linalg;
pub mod metrics;
pub mod sim;
pub mod srcc;

pub use error::{Error, Result};

/// Speed of light in vacuum (m/s), used for every delay <-> range conversion.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

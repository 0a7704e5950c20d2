//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("doppler {doppler_hz} Hz exceeds Nyquist limit {nyquist_hz} Hz")]
    DopplerBeyondNyquist { doppler_hz: f64, nyquist_hz: f64 },

    #[error("symbol index {index} out of range (M = {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("all-zero channel impulse response profile")]
    AllZeroProfile,

    #[error("windowed CIR energy is zero")]
    ZeroWindowedEnergy,

    #[error("static mean magnitude below floor on subcarrier {subcarrier}")]
    NearZeroStaticMean { subcarrier: usize },

    #[error("divisor magnitude below floor at entry ({subcarrier}, {symbol})")]
    DivisorNearZero { subcarrier: usize, symbol: usize },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("covariance ill-conditioned: estimated condition number {cond:.3e}")]
    IllConditioned { cond: f64 },

    #[error("doppler crop [{lo}, {hi}] Hz exceeds Nyquist +-{nyquist_hz} Hz")]
    CropExceedsNyquist { lo: f64, hi: f64, nyquist_hz: f64 },

    #[error("frequency {freq_hz} Hz outside axis range [{lo}, {hi}] Hz")]
    FrequencyOutOfAxis { freq_hz: f64, lo: f64, hi: f64 },

    #[error("empty peak-search region: {0}")]
    EmptySearchRegion(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("subcarrier grids differ between inputs")]
    GridMismatch,

    #[error("coincident points in bistatic geometry")]
    CoincidentPoints,

    #[error("invalid augmentation: {0}")]
    InvalidAugmentation(String),

    #[error("bad magic bytes: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported file version {found} (expected {expected})")]
    VersionMismatch { expected: u16, found: u16 },

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: u64, found: u64 },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

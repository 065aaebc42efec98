use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("problem too large for brute force: {0}")]
    TooLarge(&'static str),
    #[error("variance must be positive")]
    NonPositiveVariance,
    #[error("noise level is zero; use the noiseless decoder")]
    DegenerateNoise,
    #[error("noise level is positive; the noiseless decoder needs an exact sketch")]
    NoisySketch,
    #[error("empty input")]
    EmptyInput,
    #[error("signal is identically zero")]
    ZeroSignal,
    #[error("estimator degenerate: {0}")]
    Degenerate(&'static str),
}

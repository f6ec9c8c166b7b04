use thiserror::Error;

/// Errors produced by the oscillator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("radius {r} lies outside the radial domain (0, {upper})")]
    Domain { r: f64, upper: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("inconsistent cartesian parameters: {0}")]
    InconsistentParameters(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("period detection failed: {0}")]
    DetectionFailure(String),

    #[error("state (n_r={n_r}, m={m}) lies above the bound spectrum (n_max={n_max:?})")]
    Truncation { n_r: u32, m: i32, n_max: Option<i64> },

    #[error("quadrature did not reach the requested accuracy (estimate {estimate}, error {error})")]
    Accuracy { estimate: f64, error: f64 },

    #[error("step size underflow at t={t}")]
    StepSizeUnderflow { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

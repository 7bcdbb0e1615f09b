use thiserror::Error;

/// Errors raised by the statistics kernel.
#[derive(Debug, Error, PartialEq)]
pub enum StatError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sample too small: need at least {required}, got {actual}")]
    TooFewObservations { required: usize, actual: usize },

    #[error("sample has zero variance (all values identical)")]
    ZeroVariance,

    #[error("sample size {0} exceeds the supported maximum {1}")]
    SampleTooLarge(usize, usize),

    #[error("matrix must be complete and at least 2x2: {0}")]
    BadMatrix(String),

    #[error("paired samples have mismatched lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty sample")]
    EmptySample,

    #[error("iteration cap reached without convergence in {0}")]
    NoConvergence(&'static str),
}

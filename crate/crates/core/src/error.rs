use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace must be 1, got {trace}")]
    TraceNotOne { trace: f64 },

    #[error("invalid Schmidt spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("eigen-decomposition did not converge (reconstruction residual {residual:e})")]
    EigenNotConverged { residual: f64 },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid bisection bracket: {0}")]
    InvalidBracket(String),

    #[error("oracle returned Unknown at lambda = {lambda}")]
    OracleUnknown { lambda: f64 },

    #[error("verification failed: residual {residual:e}, most negative remainder {min_remainder:e}")]
    VerificationFailed { residual: f64, min_remainder: f64 },

    #[error("endpoint chain violated: {0}")]
    ChainViolated(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

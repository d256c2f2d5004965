use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |A - A^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystem(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("perturbative wiring regime violated: epsilon0 = {0:.3e} (must be < 0.1)")]
    WiringOutOfRange(f64),

    #[error("parameters are not dispersive: min |tau|/g = {ratio:.3} < threshold {threshold}")]
    NotDispersive { ratio: f64, threshold: f64 },

    #[error("step size too large: dt * norm = {product:.3e} >= {limit}; use at least {required_steps} steps")]
    StepTooLarge {
        product: f64,
        limit: f64,
        required_steps: usize,
    },

    #[error("numerical diagnostics failed at t = {time:.6e}: {reason}")]
    Diagnostics { time: f64, reason: String },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

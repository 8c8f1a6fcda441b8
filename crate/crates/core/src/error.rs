use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("linear solve failed: pivot {value:e} at row {row} of {size}")]
    SingularPivot { row: usize, size: usize, value: f64 },

    #[error("shift {gamma} is at the spectrum (sigma_min = {sigma_min:e})")]
    AtSpectrum { gamma: Complex64, sigma_min: f64 },

    #[error("eigensolver did not converge: {reason} (worst residual {residual:e})")]
    EigenNonConvergence { reason: String, residual: f64 },

    #[error("quadrature not converged after {doublings} doublings (relative change {change:e})")]
    QuadratureNotConverged { doublings: usize, change: f64 },

    #[error("unknown {kind} `{name}`; available: {available}")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

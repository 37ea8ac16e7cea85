use thiserror::Error;

/// Errors produced by the solvers, operators and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lanczos bidiagonalization did not converge after {restarts} restarts ({converged} of {requested} triplets converged)")]
    LanczosNonConvergence {
        restarts: usize,
        converged: usize,
        requested: usize,
    },

    #[error("{method} least squares did not converge in {iterations} iterations (relative residual {residual:e})")]
    LeastSquaresNonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("no rank in 1..={r_max} met the residual bound (best relative residual {best_residual:e})")]
    Infeasible { r_max: usize, best_residual: f64 },

    #[error("singular value thresholding diverged at iteration {iteration} (residual {residual:e})")]
    Divergence { iteration: usize, residual: f64 },

    #[error("singular value thresholding only supports the noiseless affine constraint")]
    NoisyConstraint,

    #[error("profile is undefined for the zero matrix")]
    ZeroMatrix,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(expected: impl ToString, actual: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

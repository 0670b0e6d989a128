use thiserror::Error;

/// Errors produced by oracles, solvers, and dataset handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A smooth oracle was evaluated outside the interior of its domain.
    #[error("domain violation in {oracle}: {detail}")]
    Domain {
        oracle: &'static str,
        detail: String,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("starting point is infeasible: {0}")]
    InfeasibleStart(String),

    /// The backtracking loop hit its trial cap without satisfying the descent condition.
    #[error("line search did not terminate after {trials} trials at iteration {iteration} (last L = {last_l:e})")]
    LineSearchExhausted {
        iteration: usize,
        trials: usize,
        last_l: f64,
        last_trial: Vec<f64>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing data: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

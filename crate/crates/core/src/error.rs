use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular KKT matrix at Newton iteration {iteration} (pivot {pivot:.3e} at row {row})")]
    SingularKkt {
        iteration: usize,
        row: usize,
        pivot: f64,
    },

    #[error("Newton iteration did not converge in {max_iterations} iterations (last residual {:.3e})", history.last().copied().unwrap_or(f64::NAN))]
    MaxIterations {
        max_iterations: usize,
        history: Vec<f64>,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("step {step} at t = {time:.6} s failed: {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("all {count} DCNLP sub-problems failed; first failure: {first}")]
    AllSubproblemsFailed { count: usize, first: Box<Error> },

    #[error("scenario validation failed:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("config parse error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Residual history carried by a solver failure, if any.
    pub fn residual_history(&self) -> Option<&[f64]> {
        match self {
            Error::MaxIterations { history, .. } => Some(history),
            Error::Step { source, .. } => source.residual_history(),
            _ => None,
        }
    }
}

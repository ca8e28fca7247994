use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("chain is not irreducible: {0}")]
    Irreducible(String),

    #[error("function is singular at eigenvalue {eigenvalue}")]
    Singularity { eigenvalue: f64 },

    #[error("numerical failure in {what} after {iterations} iterations (residual {residual:e})")]
    NumericalFailure {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("sampling failed: no simple graph after {attempts} pairing attempts")]
    SamplingFailure { attempts: usize },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

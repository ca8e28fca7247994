use thiserror::Error;

/// Runner failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// A requested check did not hold.
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] meetlab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use meetlab::Error as E;
        match self {
            CliError::Assertion(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Core(e) => match e {
                E::Divergence(_) => 1,
                E::InvalidInput(_)
                | E::Irreducible(_)
                | E::Precondition(_)
                | E::Budget(_)
                | E::Io(_)
                | E::Json(_) => 2,
                E::Singularity { .. } | E::NumericalFailure { .. } | E::SamplingFailure { .. } => 3,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

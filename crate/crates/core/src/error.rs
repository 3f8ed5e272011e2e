use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A self-check on a constructed object failed; this indicates a
    /// convention fault rather than bad input.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("window violation: {0}")]
    WindowViolation(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::VerificationFailed(_) | Error::HypothesisFailed(_) => 1,
            Error::BudgetExceeded(_) => 3,
            _ => 2,
        }
    }
}

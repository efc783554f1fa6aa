use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exhausted: {0}")]
    Capacity(String),

    #[error("invalid value for `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    #[error("enumeration needs {size} assignments, budget is {budget}")]
    Size { size: u128, budget: u64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(key: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            key,
            reason: reason.into(),
        }
    }
}

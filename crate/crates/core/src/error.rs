use thiserror::Error;

/// Errors produced by the algebraic core.
///
/// The variants are grouped so a front end can map them onto coarse exit
/// codes: `Parse` for unreadable input, `Validation` for data that parses but
/// violates the structure axioms, `Precondition` for well-formed data fed to
/// an operation whose contract it does not meet, and `Internal` for broken
/// invariants that indicate a bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

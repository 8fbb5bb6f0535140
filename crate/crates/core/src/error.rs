use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input (shapes, arities, parse failures).
    #[error("invalid input: {0}")]
    Input(String),
    /// Input that violates a hypothesis of the construction being run.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// A verified identity or contract failed.
    #[error("violation: {0}")]
    Violation(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn violation(msg: impl Into<String>) -> Self {
        Error::Violation(msg.into())
    }
}

use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimensions, ranges, file contents).
    #[error("invalid input: {0}")]
    Input(String),
    /// The request is well formed but exceeds what an exact routine can do,
    /// e.g. enumerating more than `MAX_ENUMERATION_SPINS` spins.
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

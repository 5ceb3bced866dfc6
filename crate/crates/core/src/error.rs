use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Caller passed arguments that violate an operation's contract.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Hypotheses of a normalization step do not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A braid search exhausted an orbit that should have contained its target.
    #[error("orbit mismatch: {0}")]
    OrbitMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("replay failed: {0}")]
    Replay(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(offset: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: msg.into(),
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or mismatched arguments.
    #[error("invalid input: {0}")]
    Input(String),

    /// The requested computation exceeds a configured enumeration or memory budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Well-formed input outside what the library handles.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A constructed object failed its numerical invariants.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}

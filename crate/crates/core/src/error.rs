use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Arguments violate a documented precondition (range, dimension, duplicate index).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed grid or params text.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An exhaustive job was refused because it exceeds an enumeration guard.
    #[error("refused: {what} needs {needed} candidates, limit is {limit}")]
    Refused {
        what: String,
        needed: u128,
        limit: u128,
    },

    /// The received array is not within one criss-cross deletion of any
    /// codeword with the given parameters (or the word has no completion).
    #[error("decode failure: {0}")]
    DecodeFailure(String),

    /// Several codewords with the given parameters are consistent with the
    /// received array.
    #[error("ambiguous: {0}")]
    Ambiguous(String),

    /// An invariant the construction guarantees was violated; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

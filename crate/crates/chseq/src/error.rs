//! One error type for the whole crate.

use thiserror::Error;

/// Failure surfaced by construction, verification, parsing, or I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A bounded search was asked to go past its configured ceiling.
    #[error("{what} = {value} exceeds the search ceiling of {ceiling}")]
    SearchCeiling {
        what: &'static str,
        value: u64,
        ceiling: u64,
    },

    /// Structurally invalid data: out-of-range elements, duplicates.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Text that does not parse as the expected interchange format.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A freshly constructed object failed its own certification sweep.
    /// This indicates a bug in the crate, not bad input.
    #[error("self-certification failed: {0}")]
    Certification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

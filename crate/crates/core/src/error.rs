use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("capacity error: {what} is {got}, limit is {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vtree node has no parent: {0}")]
    NoParent(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("handle belongs to a different manager")]
    ForeignHandle,

    #[error("R3: new information unsatisfiable")]
    UnsatisfiableNewInformation,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation interrupted by deadline")]
    Interrupted,
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

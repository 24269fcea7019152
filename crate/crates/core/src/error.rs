use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("eigensolver failed: {0}")]
    Solver(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::Solver(_) | Error::Precondition(_) => 2,
            Error::Degenerate(_) | Error::Sampling(_) => 3,
            _ => 1,
        }
    }

    /// Appends `ctx` to the message, keeping the variant (and so the exit code).
    pub fn context(self, ctx: impl std::fmt::Display) -> Error {
        match self {
            Error::InvalidPoint(m) => Error::InvalidPoint(format!("{m} ({ctx})")),
            Error::Argument(m) => Error::Argument(format!("{m} ({ctx})")),
            Error::Range(m) => Error::Range(format!("{m} ({ctx})")),
            Error::Sampling(m) => Error::Sampling(format!("{m} ({ctx})")),
            Error::Degenerate(m) => Error::Degenerate(format!("{m} ({ctx})")),
            Error::Numeric(m) => Error::Numeric(format!("{m} ({ctx})")),
            Error::Solver(m) => Error::Solver(format!("{m} ({ctx})")),
            Error::Precondition(m) => Error::Precondition(format!("{m} ({ctx})")),
            Error::Parse(m) => Error::Parse(format!("{m} ({ctx})")),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

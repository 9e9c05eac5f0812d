use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("node index {index} out of range for instance with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("not a tree: {0}")]
    NotATree(String),

    #[error("guard violation: {0}")]
    Guard(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit code used by the `dt` command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) | Error::IndexOutOfRange { .. } => 2,
            Error::Parse { .. } | Error::Io(_) | Error::Csv(_) => 3,
            Error::Guard(_) => 4,
            Error::NotATree(_) | Error::Invariant(_) => 5,
        }
    }
}

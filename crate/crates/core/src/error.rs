use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied something malformed or out of range.
    #[error("invalid input: {0}")]
    Input(String),

    /// Two independently derived structures disagree.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("sampling procedure `{procedure}` is not defined for {game}")]
    UnsupportedProcedure { procedure: String, game: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Consistency(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

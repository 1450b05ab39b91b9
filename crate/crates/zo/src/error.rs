use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: d = {0}, need d >= 1")]
    InvalidDimension(usize),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid noise spec: {0}")]
    InvalidSpec(String),
    #[error("objective evaluated to a non-finite value at {point:?}")]
    Eval { point: Vec<f64> },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    /// Process exit code for the CLI: 2 for configuration problems, 3 for i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

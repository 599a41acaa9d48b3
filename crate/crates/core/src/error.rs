use std::fmt;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// Invalid domain data (bad Betti lists, bad intervals, bad parameters).
    InvalidInput(String),
    /// Config or data-file syntax/schema violation, with 1-based line number.
    Config { line: usize, message: String },
    /// A numerical routine could not complete (bracket exhaustion, divergence).
    Solver(String),
    /// Filesystem failure wrapped with the offending path.
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Config { line, message } => write!(f, "config error at line {line}: {message}"),
            Error::Solver(msg) => write!(f, "solver error: {msg}"),
            Error::Io { path, source } => write!(f, "io error on {path}: {source}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }

    pub fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: msg.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

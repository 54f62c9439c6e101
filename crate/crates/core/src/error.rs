use std::fmt;

/// Errors produced by the block store, the solvers, and the dataset loaders.
#[derive(Debug)]
pub enum Error {
    /// A caller-supplied parameter violates a precondition.
    InvalidParameter(String),
    /// Block index past the end of a file.
    OutOfRange { block: u64, blocks: u64 },
    /// An operation that requires a non-empty input got an empty one.
    EmptyInput(&'static str),
    /// Malformed text input, with the 1-based offending line.
    Parse { line: usize, msg: String },
    /// An on-disk file failed structural validation (magic, version, size).
    Corrupt(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::OutOfRange { block, blocks } => {
                write!(f, "block {block} out of range (file has {blocks} blocks)")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::Corrupt(msg) => write!(f, "corrupt file: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

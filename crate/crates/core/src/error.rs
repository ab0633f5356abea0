use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix side mismatch: {left} vs {right}")]
    SideMismatch { left: usize, right: usize },

    #[error("cell ({row}, {col}) out of range for side {side}")]
    OutOfRange { row: u64, col: u64, side: usize },

    #[error("restricted closure needs a row or column restriction")]
    EmptyRestriction,

    #[error("evaluation exceeded its deadline")]
    Timeout,

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("line {line}: {message}")]
    MalformedTriple { line: usize, message: String },

    #[error("index file: {0}")]
    Index(#[from] IndexError),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Syntax error in a path query, with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown backend tag {0}")]
    UnknownBackend(u8),
    #[error("backend mismatch: index holds {found}, expected {expected}")]
    BackendMismatch { found: String, expected: String },
    #[error("truncated file")]
    Truncated,
    #[error("corrupt data: {0}")]
    Corrupt(String),
}

/// Maps an I/O error hit while decoding an index into the matching index error.
pub(crate) fn decode_error(err: io::Error) -> Error {
    if err.kind() == io::ErrorKind::UnexpectedEof {
        Error::Index(IndexError::Truncated)
    } else {
        Error::Io(err)
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid stream value {value} at index {index}: values must be finite and non-negative")]
    InvalidValue { index: u64, value: f64 },

    #[error("incompatible sketches: {0}")]
    Incompatible(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("malformed sketch: {0}")]
    Format(#[from] FormatError),
}

/// Failures while decoding the binary sketch format.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated payload: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("{0} trailing bytes after sketch values")]
    TrailingBytes(usize),
    #[error("invalid header field: {0}")]
    InvalidHeader(&'static str),
    #[error("row {0} holds a negative or non-finite value")]
    InvalidValue(usize),
}

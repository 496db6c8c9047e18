use std::fmt;

/// Crate-wide error type.
///
/// `Budget` is kept distinct from `Config` because callers (notably the CLI)
/// map the two to different exit codes: a budget refusal is not a user
/// mistake, it is an explicit refusal to enumerate a space that is too large.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two arguments that must share a dimension do not.
    DimensionMismatch { expected: usize, got: usize },
    /// A coordinate value lies outside its alphabet.
    OutOfRange { coord: usize, value: u32, size: u32 },
    /// Two functions that must share a domain do not.
    DomainMismatch,
    /// The requested operation is not defined for these parameters.
    Unsupported(String),
    /// An exact operation would need to visit more states than allowed.
    Budget { required: u128, allowed: u128 },
    /// Invalid configuration or spec string.
    Config(String),
    /// Malformed input file.
    Parse(String),
    /// A decoder could not produce a value (all votes void, or a tie).
    DecodeFailed(String),
    /// I/O failure, stringified so the error stays cloneable.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::OutOfRange { coord, value, size } => {
                write!(f, "coordinate {coord} has value {value}, alphabet size is {size}")
            }
            Error::DomainMismatch => write!(f, "functions are defined on different domains"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::Budget { required, allowed } => {
                write!(f, "budget refusal: operation needs {required} steps, allowed {allowed}")
            }
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::DecodeFailed(msg) => write!(f, "decode failed: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

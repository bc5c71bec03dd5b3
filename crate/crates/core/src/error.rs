use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Requested dense object exceeds the configured entry cap.
    Size { requested: u128, cap: usize },
    /// Malformed or out-of-contract argument.
    Argument(String),
    /// Enumeration count above its cap (permutations, resonance tuples).
    Enumeration { requested: u128, cap: u128 },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Size { requested, cap } => {
                write!(f, "dense size {requested} exceeds cap {cap}")
            }
            Error::Argument(m) => write!(f, "invalid argument: {m}"),
            Error::Enumeration { requested, cap } => {
                write!(f, "enumeration of {requested} terms exceeds cap {cap}")
            }
        }
    }
}

impl core::error::Error for Error {}

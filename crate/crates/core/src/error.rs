use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {p}: {reason}")]
    InvalidModulus { p: u64, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("genus {g} out of range: {reason}")]
    GenusOutOfRange { g: usize, reason: String },

    #[error("prime {p} too small for derivative-based computation at genus {g} (need p > 2g-4)")]
    PrimeTooSmall { p: u64, g: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

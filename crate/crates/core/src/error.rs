use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operands or parameters disagree on shape (dimension, cube size, group).
    #[error("structural error: {0}")]
    Structure(String),

    /// A caller-side precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A configured work budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("grid spacing {spacing} is coarser than eps/4 = {limit}; use at least {suggested} cells per dimension")]
    GridTooCoarse {
        spacing: f64,
        limit: f64,
        suggested: usize,
    },

    #[error("invalid group law: {0}")]
    GroupLaw(String),

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

use std::fmt;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A monotone search did not reach its target before the hard cap.
    #[error("not found: {0}")]
    NotFound(String),

    /// A ratio estimate whose denominator is zero.
    #[error("undefined result: {0}")]
    UndefinedResult(String),

    /// The requested computation exceeds a configured size cap.
    #[error("capacity exceeded: {0}")]
    CapExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidArgument(msg.to_string())
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        match $cond {
            true => {}
            false => return Err($crate::error::Error::InvalidArgument(format!($($arg)+))),
        }
    };
}
pub(crate) use ensure;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        // Bound first so that a NaN operand makes the check fail.
        let ok: bool = $cond;
        if !ok {
            return Err($crate::error::Error::invalid(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;

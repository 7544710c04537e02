use thiserror::Error;

/// Failure modes shared by every module of the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller supplied an argument outside the documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two independent evaluation routes disagreed beyond tolerance. This
    /// never happens for valid input; it points at a bookkeeping bug.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// A request would need more memory or time than the configured budget.
    #[error("resource budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

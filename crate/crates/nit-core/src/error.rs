use thiserror::Error;

/// Error type shared by every fallible operation in this crate.
///
/// The variants deliberately mirror how callers need to react rather than
/// where the failure happened: the CLI maps [`Error::Capacity`] to its own
/// exit code and treats everything else as malformed input.
#[derive(Debug, Error)]
pub enum Error {
    /// The arguments violate a documented precondition (mismatched ground
    /// sets, out-of-range indices, duplicate labels, and so on).
    #[error("{0}")]
    Domain(String),

    /// The request is well-formed but exceeds a configured capacity limit.
    /// Raise the relevant [`Limits`](crate::Limits) field to proceed.
    #[error("{what}: needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    /// The construction does not exist mathematically; no limit raise or
    /// input tweak will make it succeed.
    #[error("{0}")]
    Unsupported(String),

    /// Malformed textual input: JSON bodies, cycle strings, label lists.
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

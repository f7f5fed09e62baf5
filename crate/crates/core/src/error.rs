use thiserror::Error;

/// Failure modes shared by every solver in the crate.
///
/// The variants are deliberately coarse: callers (the CLI in particular)
/// map each one onto a distinct exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input: bad instance data, an assignment that does not
    /// cover the jobs, an inconsistent schedule document.
    #[error("validation error: {0}")]
    Validation(String),
    /// A configured size budget would be exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// An internal precondition did not hold.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}

pub(crate) fn resource(msg: impl Into<String>) -> Error {
    Error::ResourceLimit(msg.into())
}

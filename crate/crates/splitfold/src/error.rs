//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Errors reported by splitting, subgroup and train track operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Input does not satisfy a structural invariant (bad graph, bad
    /// marking, dangling reference, malformed path encoding, ...).
    Validation(String),
    /// A search or intermediate object exceeded the configured envelope.
    ResourceLimit(String),
    /// The input is valid but the operation does not apply to it
    /// (e.g. a witness was requested for a filling path).
    Inapplicable(String),
    /// A configuration the implementation deliberately does not cover.
    NotImplemented(String),
    /// A claimed invariant failed at runtime; indicates a bug or a
    /// violated mathematical expectation, never silently ignored.
    PropertyViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(m) => write!(f, "validation error: {m}"),
            Error::ResourceLimit(m) => write!(f, "resource limit exceeded: {m}"),
            Error::Inapplicable(m) => write!(f, "operation not applicable: {m}"),
            Error::NotImplemented(m) => write!(f, "not implemented: {m}"),
            Error::PropertyViolation(m) => write!(f, "property violation: {m}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

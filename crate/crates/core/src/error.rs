//! Failure classes shared by every module.
//!
//! The classes are part of the tool contract: the CLI maps them onto fixed
//! exit codes, so a failure must land in the right class. `Syntax` covers
//! malformed input bytes, `Invalid` covers well-formed input that violates a
//! model invariant, `TooLarge` is the explicit size cap on exponential
//! enumerations, and `Internal` marks a broken internal invariant such as a
//! certificate that fails its arithmetic re-check. `Internal` is always a
//! bug in this crate, never a user error.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{what} needs {needed} columns, exceeding the size cap of {cap}")]
    TooLarge {
        what: &'static str,
        needed: u128,
        cap: u64,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn syntax(message: impl Into<String>) -> Self {
        Error::Syntax(message.into())
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Error::Internal(message.into())
    }
}

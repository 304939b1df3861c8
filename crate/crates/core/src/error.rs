use thiserror::Error;

use crate::dersys::VerifyReport;

/// Errors raised by the algebra, calculus and checker routines.
///
/// The variants map onto the CLI exit codes: parse and usage errors exit
/// with 2, domain errors with 3 and numeric failures with 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed call: mismatched lengths, wrong shapes, missing parents.
    #[error("usage error: {0}")]
    Usage(String),
    /// A mathematical precondition does not hold for the given input.
    #[error("domain error: {0}")]
    Domain(String),
    /// A derivative system failed its axioms; the report lists every violation.
    #[error("invalid derivative system: {} violation(s)", .0.violations.len())]
    InvalidSystem(Box<VerifyReport>),
    /// The numerics could not reach a decision inside the configured tolerances.
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse(_) | Error::Io(_) => 2,
            Error::Domain(_) | Error::InvalidSystem(_) => 3,
            Error::Numeric(_) => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Command-line front end: one subcommand per computed law, plus the
//! verification suites.

pub mod args;
pub mod commands;
pub mod verify;

use freejacobi_core::Error as CoreError;
use std::fmt;

/// Why a subcommand failed. Each kind maps to one exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad flags, parameters or output paths: exit code 2.
    Usage(String),
    /// A computation failed: exit code 3.
    Numeric(String),
    /// `verify` ran but some criterion failed: exit code 1.
    Unverified,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Unverified => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Numeric(m) => write!(f, "numerical failure: {m}"),
            Failure::Unverified => write!(f, "verification failed"),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) | CoreError::Pole(_) | CoreError::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

//! File formats and command implementations behind the `parseval-erasure` binary.
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O or malformed frame file,
//! 4 no trial accepted under conditioning.

pub mod commands;
pub mod formats;

use std::fmt;

/// Environment variable consulted for `--seed` when the flag is absent.
pub const SEED_ENV: &str = "PARSEVAL_ERASURE_SEED";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Invalid(String),
    Io(String),
    NoAcceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
            CliError::NoAcceptance(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Io(m) | CliError::NoAcceptance(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<parseval_erasure::Error> for CliError {
    fn from(e: parseval_erasure::Error) -> Self {
        match e {
            parseval_erasure::Error::NoAcceptedTrials { .. } => {
                CliError::NoAcceptance(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

//! Command implementations behind the `vortlab` binary.

pub mod diagnose;
pub mod exponents;
pub mod simulate;
pub mod verify;

use std::fmt;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const RUNTIME: i32 = 2;
    pub const VERIFY_FAILED: i32 = 3;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(vortlab::Error),
    VerificationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Runtime(_) => exit::RUNTIME,
            CliError::VerificationFailed(_) => exit::VERIFY_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
            CliError::VerificationFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<vortlab::Error> for CliError {
    fn from(e: vortlab::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(vortlab::Error::Io(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

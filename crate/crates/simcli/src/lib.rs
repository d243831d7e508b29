//! Monte-Carlo link-level simulation harness and CLI plumbing.
//!
//! The harness runs independent codeword drops: each trial encodes a random
//! message, carries it through the scheduled repetitions over the fading or
//! AWGN channel, combines the received copies, decodes, and drives the
//! stop-feedback protocol. Per-trial seeds are derived from the master seed
//! and the trial index, so results are reproducible bit-for-bit at any worker
//! count.

pub mod campaign;
pub mod config;
pub mod results;
pub mod vectors;
pub mod verify;

use std::fmt;

/// Harness-level error with CLI exit-code semantics.
#[derive(Debug)]
pub enum CliError {
    /// Malformed configuration or parameters (exit code 2).
    Config(String),
    /// Requested payload does not fit the dictionary (exit code 3).
    Capacity(String),
    /// Filesystem or serialization trouble (exit code 1).
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Capacity(msg) => write!(f, "capacity error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Capacity(_) => 3,
        }
    }
}

impl From<zcqo_core::Error> for CliError {
    fn from(err: zcqo_core::Error) -> Self {
        match err {
            zcqo_core::Error::Capacity(msg) => CliError::Capacity(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

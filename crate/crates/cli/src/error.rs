//! Error taxonomy of the harness, mapped onto documented exit codes.
//!
//! Config errors cover the experiment file and command-line values, schema
//! errors cover fixture files named on the command line, and model errors
//! cover failures raised by the simulation itself. Exit codes: 2, 3, 4.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad experiment config or command-line value (exit 2).
    Config(String),
    /// Malformed or inconsistent fixture file (exit 3).
    Schema(String),
    /// The model rejected the run or an output could not be written (exit 4).
    Model(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    pub fn model(msg: impl Into<String>) -> Self {
        CliError::Model(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Schema(_) => 3,
            CliError::Model(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Schema(msg) => write!(f, "schema error: {msg}"),
            CliError::Model(msg) => write!(f, "model error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Default mapping for errors surfacing from the simulation core.
impl From<pxbar_core::Error> for CliError {
    fn from(err: pxbar_core::Error) -> Self {
        CliError::Model(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

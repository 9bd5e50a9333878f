//! Scenario loading and pipeline drivers behind the `sofar` binary.

pub mod commands;
pub mod scenario;

/// How a command run failed, split by who gets the blame in the exit code:
/// bad input (2) versus a model or I/O failure at runtime (1).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<sofar_core::error::Error> for CliError {
    fn from(e: sofar_core::error::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("encoding output failed: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

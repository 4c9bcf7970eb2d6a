//! File formats and the `spidernet` command-line driver on top of
//! [`spidernet_core`].
//!
//! [`commands`] holds one function per subcommand, usable without going
//! through argument parsing. [`io`] reads and writes the text formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod io;

pub use config::RunConfig;

/// Failure of a command, with a stable process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {}", .0.kind(), .0)]
    Core(#[from] spidernet_core::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("comparison failed: max deviation {deviation:e} above tolerance {tolerance:e}")]
    ComparisonFailed { deviation: f64, tolerance: f64 },
}

impl CliError {
    /// `2` for bad requests, `3` for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_usage() => 2,
            CliError::Core(_) => 3,
            CliError::Usage(_) | CliError::Io(_) | CliError::Format(_) => 2,
            CliError::ComparisonFailed { .. } => 3,
        }
    }
}

//! Batch driver for the fractional advection-dispersion solvers.
//!
//! Each command reads a [`RunConfig`], runs one experiment and writes CSV
//! files into the configured output directory. Output is a deterministic
//! function of the configuration and seed.

pub mod commands;
pub mod config;
pub mod output;

use fade_core::FadeError;

pub use commands::{run, Command};
pub use config::{Profile, RawConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Solver(#[from] FadeError),
}

impl CliError {
    /// 1 for bad input, 2 when the numerics fail on valid input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

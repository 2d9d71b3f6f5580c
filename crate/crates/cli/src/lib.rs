//! Command-line driver: configuration, study orchestration and file output.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

pub use config::{parse_config, parse_config_str, Command, Family, MethodArg, RunConfig, VorticitySpace};
pub use output::{format_csv, format_vtk, write_csv, write_vtk, CSV_HEADER};
pub use run::{print_diagnostics, run};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Args(#[from] clap::Error),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] vvp_core::Error),
}

impl CliError {
    /// 0 for help output, 2 for invalid input, 3 for a failed solve, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(e) => e.exit_code(),
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) | CliError::Core(vvp_core::Error::SolverFailure(_)) => 3,
            CliError::Io { .. } => 4,
            CliError::Core(_) => 2,
        }
    }
}

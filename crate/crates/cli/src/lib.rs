//! Command-line front end for socialhk: configuration, sweeps and result
//! files.

pub mod commands;
pub mod config;
pub mod run;

use std::path::PathBuf;

pub use config::{ExperimentConfig, GraphSource, InitialSource, StopMode};
pub use run::{run_experiment, SweepResult, SweepRow};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: socialhk::IoError },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Numerical(#[from] socialhk::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }

    pub(crate) fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub(crate) fn input(path: &std::path::Path, source: socialhk::IoError) -> Self {
        CliError::Input { path: path.into(), source }
    }
}

macro_rules! numerical {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numerical(e.into())
            }
        }
    )*};
}

numerical!(
    socialhk::GraphError,
    socialhk::SpectralError,
    socialhk::DynamicsError,
    socialhk::BoundsError,
    socialhk::SlowMergeError
);

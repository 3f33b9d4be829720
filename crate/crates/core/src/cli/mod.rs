//! Command-line front end: configuration, CSV output and the five
//! subcommands.

mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_entangle, cmd_readout, cmd_sweep_k, cmd_sweep_temp, cmd_validate, ValidationCheck};
pub use config::{Detuning, RunConfig, Spacing, SweepSpec};
pub use output::{CsvTable, OutputMeta};

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error (line {line}, key {key}): {msg}")]
    Config { line: usize, key: String, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(crate::Error),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            // Parameter problems are configuration problems.
            crate::Error::InvalidArgument(msg) => CliError::Config {
                line: 0,
                key: "-".into(),
                msg,
            },
            other => CliError::Numerical(other),
        }
    }
}

/// Flags shared by every subcommand, applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub rtol: Option<f64>,
    pub samples: Option<usize>,
    pub reproducible: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.rtol {
            if !(r.is_finite() && r > 0.0) {
                return Err(CliError::Config {
                    line: 0,
                    key: "--rtol".into(),
                    msg: format!("must be > 0, got {r}"),
                });
            }
            cfg.rtol = r;
        }
        if let Some(n) = self.samples {
            if n < 2 {
                return Err(CliError::Config {
                    line: 0,
                    key: "--samples".into(),
                    msg: format!("must be >= 2, got {n}"),
                });
            }
            cfg.samples = n;
        }
        Ok(())
    }
}

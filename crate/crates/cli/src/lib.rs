//! Command-line pipeline: base-flow solves, spectrum asymptotics with an
//! optional oracle cross-check, stability margins and parameter sweeps.
//!
//! Every command writes its files into `--out` together with a
//! `manifest.json`; each output file names the manifest hash in its header.

pub mod commands;
pub mod manifest;
pub mod svg;
pub mod sweep;

use std::path::PathBuf;

pub use commands::{
    cmd_baseflow, cmd_margin, cmd_oracle, cmd_spectrum, cmd_sweep, run, BaseflowArgs, Cli,
    Command, MarginArgs, OracleArgs, SpectrumArgs, SweepArgs,
};
pub use manifest::RunManifest;
pub use svg::emit_svg;

/// Exit code on success.
pub const EXIT_OK: i32 = 0;
/// Malformed or invalid input (configuration, sweep spec, flags, files).
pub const EXIT_INPUT: i32 = 1;
/// The numerics failed: no convergence, lost closure branch, no bracket.
pub const EXIT_SOLVER: i32 = 2;
/// The oracle matched none of the asymptotic seeds.
pub const EXIT_ORACLE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] polychan_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("oracle matched no seed within {limit} relative distance ({tried} seeds tried)")]
    OracleUnmatched { limit: f64, tried: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use polychan_core::Error as E;
        match self {
            CliError::Core(E::Parse(_) | E::Validation { .. }) => EXIT_INPUT,
            CliError::Core(_) => EXIT_SOLVER,
            CliError::Io { .. } | CliError::Usage(_) => EXIT_INPUT,
            CliError::OracleUnmatched { .. } => EXIT_ORACLE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn read_text(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_text(path: &std::path::Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

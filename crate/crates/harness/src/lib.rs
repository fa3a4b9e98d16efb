//! Experiment harness for the `cdmpsl` optimizer: configuration documents,
//! per-run history files, parallel experiment execution and charts.

pub mod config;
pub mod experiment;
pub mod history;
pub mod plot;

use std::path::PathBuf;

pub use config::{parse_config, ExperimentConfig, ProblemEntry, Variant};
pub use experiment::{execute_experiment, run_cell, Cell, ExperimentSummary};
pub use history::{read_history, write_history, HistoryRecord};
pub use plot::emit_plot;

/// Name of the environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CDMPSL_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] cdmpsl_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: malformed file: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{}: cannot align runs: {message}", path.display())]
    Alignment { path: PathBuf, message: String },
}

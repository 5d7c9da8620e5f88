//! Experiments on row-regular random matrices: configuration, parallel
//! deterministic trials, summaries and CSV / JSON output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod parse;
pub mod stats;

pub use config::{Experiment, ExperimentConfig, Format, Mode, Params};
pub use error::{HarnessError, Result};
pub use output::{RunOutput, SummaryRow, TrialRecord};

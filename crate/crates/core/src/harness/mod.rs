//! Experiments, statistics, verification suites and reports.

mod experiment;
mod report;
pub mod stats;
mod verify;

pub use experiment::{run_experiment, ExperimentConfig, Report, Strategy, TrialMetrics};
pub use report::{recurrence_csv, report_csv, report_json, suite_csv, threshold_csv, ThresholdRow, SCHEMA_LINE};
pub use verify::{verify_suite, Check, Suite, SuiteReport};

use thiserror::Error;

use crate::color::ColorError;
use crate::game::GameError;
use crate::graph::GraphError;
use crate::matcher::MatchError;
use crate::recurrence::RecurrenceError;
use crate::sparsify::SparsifyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invariant violated in trial {trial} (seed {seed}): {detail}")]
    Invariant { trial: usize, seed: u64, detail: String },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

impl HarnessError {
    /// Whether the error reports a broken invariant rather than bad input.
    pub fn is_invariant(&self) -> bool {
        matches!(self, HarnessError::Invariant { .. })
    }
}

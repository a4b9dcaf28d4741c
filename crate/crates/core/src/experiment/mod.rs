//! Seeded replicas, persisted outcome records and aggregate reports.

mod compare;
mod config;
mod report;
mod runner;

pub use compare::{compare, write_overlay_csv, Comparison};
pub use config::{Algorithm, ExperimentConfig, SutSource};
pub use report::{read_outcomes, ErroredReplica, Report, TimeBreakdown};
pub use runner::{execute_replicas, run_experiment, ExperimentOutput, ReplicaRecord, ReplicaStatus, ReplicaTiming};

use thiserror::Error;

use crate::survival::SurvivalError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    /// Every replica failed, so there is nothing to aggregate.
    #[error("all replicas failed; first error: {0}")]
    AllFailed(String),
    #[error("malformed record: {0}")]
    Format(String),
    #[error(transparent)]
    Survival(#[from] SurvivalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for ExperimentError {
    fn from(e: serde_json::Error) -> Self {
        ExperimentError::Format(e.to_string())
    }
}

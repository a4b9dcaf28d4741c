use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::TestTiming;
use crate::survival::{
    falsification_rate, kaplan_meier, mean_executions, Observation, RateEstimate, SurvivalCurve, SurvivalData,
};

use super::runner::{ReplicaRecord, ReplicaStatus};
use super::{Algorithm, ExperimentConfig, ExperimentError};

/// Mean per-test generation, training and execution time and the share of
/// the total spent executing the SUT.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeBreakdown {
    pub tests: usize,
    pub mean_generation: f64,
    pub mean_training: f64,
    pub mean_execution: f64,
    pub total: f64,
    /// Total execution time over total time, 0 when nothing was timed.
    pub ratio: f64,
}

impl TimeBreakdown {
    pub fn from_timings(timings: &[TestTiming]) -> Self {
        let n = timings.len();
        let (mut g, mut t, mut e) = (0.0, 0.0, 0.0);
        for x in timings {
            g += x.generation;
            t += x.training;
            e += x.execution;
        }
        let total = g + t + e;
        let mean = |v: f64| if n == 0 { 0.0 } else { v / n as f64 };
        TimeBreakdown {
            tests: n,
            mean_generation: mean(g),
            mean_training: mean(t),
            mean_execution: mean(e),
            total,
            ratio: if total > 0.0 { (e / total).clamp(0.0, 1.0) } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErroredReplica {
    pub replica: usize,
    pub seed: u64,
    pub error: String,
}

/// Aggregate statistics of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub algorithm: Algorithm,
    pub sut: String,
    pub requirement: String,
    pub budget: usize,
    pub seed: u64,
    pub replicas: usize,
    /// Replicas entering the statistics.
    pub completed: usize,
    pub errored: Vec<ErroredReplica>,
    pub falsified: usize,
    pub falsification_rate: RateEstimate,
    /// Mean executions to falsification over falsified replicas.
    pub mean_executions: Option<f64>,
    /// Per completed replica, in replica order.
    pub observations: Vec<Observation>,
    pub survival: SurvivalCurve,
    /// Over every test of the completed replicas.
    pub timing: TimeBreakdown,
}

impl Report {
    pub fn from_records(config: &ExperimentConfig, records: &[ReplicaRecord]) -> Result<Self, ExperimentError> {
        let budget = config.ogan.budget;
        let mut observations = Vec::new();
        let mut errored = Vec::new();
        let mut timings = Vec::new();
        for r in records {
            match r.observation() {
                Some(o) => {
                    observations.push(o);
                    timings.extend_from_slice(&r.timing.per_test);
                }
                None => errored.push(ErroredReplica {
                    replica: r.replica,
                    seed: r.seed,
                    error: r.error.clone().unwrap_or_default(),
                }),
            }
        }
        if observations.is_empty() {
            let first = errored.first().map(|e| e.error.clone()).unwrap_or_else(|| "no replicas".into());
            return Err(ExperimentError::AllFailed(first));
        }
        let data = SurvivalData::new(budget, observations.clone())?;
        let requirement = match &config.requirement {
            Some(r) => r.clone(),
            None => config
                .sut
                .build()
                .map(|s| s.requirement)
                .map_err(|e| ExperimentError::Config(e.to_string()))?,
        };
        let sut = match &config.sut {
            super::SutSource::Builtin(name) => name.clone(),
            super::SutSource::Spec(spec) => spec.build().map(|s| s.name).unwrap_or_default(),
        };
        Ok(Report {
            algorithm: config.algorithm,
            sut,
            requirement,
            budget,
            seed: config.seed,
            replicas: records.len(),
            completed: observations.len(),
            errored,
            falsified: data.falsified(),
            falsification_rate: falsification_rate(&data),
            mean_executions: mean_executions(&data),
            survival: kaplan_meier(&data),
            observations,
            timing: TimeBreakdown::from_timings(&timings),
        })
    }

    pub fn survival_data(&self) -> Result<SurvivalData, ExperimentError> {
        Ok(SurvivalData::new(self.budget, self.observations.clone())?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let file = File::open(path)?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }
}

/// Reads the records of an `outcomes.jsonl` file.
pub fn read_outcomes(path: &Path) -> Result<Vec<ReplicaRecord>, ExperimentError> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

impl ReplicaRecord {
    pub fn is_completed(&self) -> bool {
        self.status == ReplicaStatus::Completed
    }
}

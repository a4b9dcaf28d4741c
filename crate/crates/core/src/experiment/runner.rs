use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{
    run_ogan, run_random_search, EngineError, FalsificationOutcome, OganConfig, Problem, TestRecord, TestTiming,
};
use crate::par;
use crate::signal::TestInput;
use crate::survival::Observation;

use super::report::{Report, TimeBreakdown};
use super::{ExperimentConfig, ExperimentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplicaStatus {
    Completed,
    /// The SUT failed; the replica is excluded from the statistics.
    Errored,
}

/// Wall-clock data of one replica, kept apart so records can be compared
/// across runs without it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaTiming {
    pub breakdown: TimeBreakdown,
    pub per_test: Vec<TestTiming>,
}

/// One line of `outcomes.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    pub replica: usize,
    pub seed: u64,
    pub status: ReplicaStatus,
    #[serde(default)]
    pub error: Option<String>,
    /// Executions until the first falsification, or the budget if censored.
    pub event_time: Option<usize>,
    pub censored: Option<bool>,
    pub budget: usize,
    pub executions_used: usize,
    pub falsifying_input: Option<TestInput>,
    pub tests: Vec<TestRecord>,
    pub timing: ReplicaTiming,
}

impl ReplicaRecord {
    fn from_outcome(replica: usize, seed: u64, o: FalsificationOutcome) -> Self {
        ReplicaRecord {
            replica,
            seed,
            status: ReplicaStatus::Completed,
            error: None,
            event_time: Some(o.executions),
            censored: Some(!o.falsified),
            budget: o.budget,
            executions_used: o.executions_used,
            falsifying_input: o.falsifying_input,
            timing: ReplicaTiming {
                breakdown: TimeBreakdown::from_timings(&o.timings),
                per_test: o.timings,
            },
            tests: o.tests,
        }
    }

    fn errored(replica: usize, seed: u64, budget: usize, error: String, partial: Option<FalsificationOutcome>) -> Self {
        let (tests, timings, used) = match partial {
            Some(o) => (o.tests, o.timings, o.executions_used),
            None => (Vec::new(), Vec::new(), 0),
        };
        ReplicaRecord {
            replica,
            seed,
            status: ReplicaStatus::Errored,
            error: Some(error),
            event_time: None,
            censored: None,
            budget,
            executions_used: used,
            falsifying_input: None,
            timing: ReplicaTiming {
                breakdown: TimeBreakdown::from_timings(&timings),
                per_test: timings,
            },
            tests,
        }
    }

    /// Survival observation of a completed replica.
    pub fn observation(&self) -> Option<Observation> {
        match (self.status, self.event_time, self.censored) {
            (ReplicaStatus::Completed, Some(t), Some(c)) => Some(Observation { time: t, censored: c }),
            _ => None,
        }
    }

    /// The record as JSON with the timing field removed.
    pub fn without_timing(&self) -> Result<serde_json::Value, ExperimentError> {
        let mut v = serde_json::to_value(self)?;
        if let Some(map) = v.as_object_mut() {
            map.remove("timing");
        }
        Ok(v)
    }
}

fn run_replica(problem: &Problem, config: &ExperimentConfig, replica: usize) -> Result<ReplicaRecord, ExperimentError> {
    let seed = config.replica_seed(replica);
    let budget = config.ogan.budget;
    let result = match (config.algorithm.variant(), config.algorithm.sampler()) {
        (Some(variant), _) => run_ogan(
            problem,
            &OganConfig {
                seed,
                variant,
                ..config.ogan.clone()
            },
        ),
        (None, Some(sampler)) => run_random_search(problem, budget, sampler, config.ogan.stop, seed),
        (None, None) => unreachable!("every algorithm is a variant or a sampler"),
    };
    match result {
        Ok(o) => Ok(ReplicaRecord::from_outcome(replica, seed, o)),
        Err(EngineError::Sut { source, partial }) => Ok(ReplicaRecord::errored(
            replica,
            seed,
            budget,
            source.to_string(),
            partial.map(|b| *b),
        )),
        Err(e) => Err(ExperimentError::Config(format!("replica {replica}: {e}"))),
    }
}

/// Runs every replica on up to `workers` threads and returns the records in
/// replica order.
pub fn execute_replicas(
    config: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<Vec<ReplicaRecord>, ExperimentError> {
    let problem = config.problem()?;
    let indices: Vec<usize> = (0..config.replicas).collect();
    let results = par::with_workers(workers, || par::map(&indices, |&i| run_replica(&problem, config, i)))
        .map_err(ExperimentError::Config)?;
    results.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<ReplicaRecord>,
    pub report: Report,
}

impl ExperimentOutput {
    pub fn errored(&self) -> usize {
        self.report.errored.len()
    }
}

/// Runs the experiment and writes `config.toml`, `outcomes.jsonl`,
/// `report.json` and `survival.csv` into the configured output directory.
///
/// Outcome records are written even when every replica failed, in which case
/// the error carries the first failure.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentOutput, ExperimentError> {
    let records = execute_replicas(config, workers)?;
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), config.to_toml()?)?;
    write_outcomes(&dir.join("outcomes.jsonl"), &records)?;
    let report = Report::from_records(config, &records)?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    let mut csv = BufWriter::new(File::create(dir.join("survival.csv"))?);
    report.survival.write_csv(&mut csv)?;
    csv.flush()?;
    Ok(ExperimentOutput { records, report })
}

fn write_outcomes(path: &Path, records: &[ReplicaRecord]) -> Result<(), ExperimentError> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{OganConfig, Problem, SamplerKind, Variant};
use crate::stl::parse_stl;
use crate::sut::{builtin, SutDescriptor, SutError, SutSpec};

use super::ExperimentError;

/// A registered SUT name or an inline SUT table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SutSource {
    Builtin(String),
    Spec(SutSpec),
}

impl SutSource {
    pub fn build(&self) -> Result<SutDescriptor, SutError> {
        match self {
            SutSource::Builtin(name) => builtin(name),
            SutSource::Spec(spec) => spec.build(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    OganAdaptive,
    OganNonadaptive,
    RandomUniform,
    RandomLhs,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OganAdaptive => "ogan-adaptive",
            Algorithm::OganNonadaptive => "ogan-nonadaptive",
            Algorithm::RandomUniform => "random-uniform",
            Algorithm::RandomLhs => "random-lhs",
        }
    }

    pub(crate) fn variant(self) -> Option<Variant> {
        match self {
            Algorithm::OganAdaptive => Some(Variant::Adaptive),
            Algorithm::OganNonadaptive => Some(Variant::Nonadaptive),
            _ => None,
        }
    }

    pub(crate) fn sampler(self) -> Option<SamplerKind> {
        match self {
            Algorithm::RandomUniform => Some(SamplerKind::Uniform),
            Algorithm::RandomLhs => Some(SamplerKind::LatinHypercube),
            _ => None,
        }
    }
}

/// One experiment: `replicas` seeded runs of an algorithm on a SUT.
///
/// The `[ogan]` table holds the falsifier hyperparameters; its `budget` and
/// `stop` also apply to the random baselines. Its `seed` is ignored: replica
/// `i` runs with `seed + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sut: SutSource,
    /// Requirement text; defaults to the SUT's own requirement.
    #[serde(default)]
    pub requirement: Option<String>,
    pub algorithm: Algorithm,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub ogan: OganConfig,
}

fn default_replicas() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    pub fn new(sut: SutSource, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            sut,
            requirement: None,
            algorithm,
            replicas: default_replicas(),
            seed: 0,
            out: default_out(),
            ogan: OganConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, ExperimentError> {
        toml::to_string(self).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn replica_seed(&self, replica: usize) -> u64 {
        self.seed.wrapping_add(replica as u64)
    }

    /// Builds the SUT and requirement, checking everything that can be
    /// checked before execution.
    pub fn problem(&self) -> Result<Problem, ExperimentError> {
        if self.replicas == 0 {
            return Err(ExperimentError::Config("replica count must be at least 1".into()));
        }
        self.ogan.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
        let sut = self.sut.build().map_err(|e| ExperimentError::Config(e.to_string()))?;
        let requirement = match &self.requirement {
            Some(text) => parse_stl(text),
            None => sut.default_requirement(),
        }
        .map_err(|e| ExperimentError::Config(format!("requirement: {e}")))?;
        // Every input and output signal carries a range, so this also rejects
        // names the SUT does not produce.
        Problem::new(sut, requirement).map_err(|e| ExperimentError::Config(format!("requirement: {e}")))
    }
}

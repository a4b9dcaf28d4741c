//! The OGAN falsification loop and its baselines.

mod config;
mod ogan;
mod run;
mod sampling;
mod threshold;

pub use config::{OganConfig, SamplerKind, StopCondition, Variant};
pub use ogan::{
    generated_test, monte_carlo_test, sample_test, train_discriminator, train_generator, train_models,
    DiscriminatorKind, Models, OganState, Sampled, Streams,
};
pub use run::{
    run_falsification, run_nonadaptive, run_ogan, run_random_search, Evaluation, FalsificationOutcome, Origin,
    Problem, TestRecord, TestTiming,
};
pub use sampling::{sample_lhs, sample_uniform, stratum};
pub use threshold::{AcceptanceThreshold, CandidateQueue};

use thiserror::Error;

use crate::nn::NnError;
use crate::stl::StlError;
use crate::sut::SutError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    /// SUT failure, with the tests executed before it.
    #[error("SUT execution failed: {source}")]
    Sut {
        source: SutError,
        partial: Option<Box<FalsificationOutcome>>,
    },
    #[error(transparent)]
    Stl(#[from] StlError),
    #[error(transparent)]
    Nn(#[from] NnError),
}

impl EngineError {
    fn sut(source: SutError) -> Self {
        EngineError::Sut { source, partial: None }
    }

    /// Attaches the outcome so far to a SUT failure.
    fn with_partial(self, outcome: &FalsificationOutcome) -> Self {
        match self {
            EngineError::Sut { source, .. } => EngineError::Sut {
                source,
                partial: Some(Box::new(outcome.clone())),
            },
            other => other,
        }
    }
}

use serde::{Deserialize, Serialize};

use super::EngineError;

/// Monte Carlo sampler used for the initial phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    #[default]
    Uniform,
    LatinHypercube,
}

/// Whether generator-proposed tests feed back into the training data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Adaptive,
    Nonadaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StopCondition {
    /// Stop at the first confirmed falsification.
    #[default]
    FirstFalsification,
    /// Always spend the whole budget.
    BudgetExhausted,
}

/// Falsifier hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OganConfig {
    /// Execution budget `E`.
    pub budget: usize,
    /// Initial Monte Carlo tests `N`.
    pub initial: usize,
    /// Probability `P` of a Monte Carlo draw in place of a generated test.
    pub sample_probability: f64,
    pub batch_size: usize,
    pub discriminator_epochs: usize,
    pub generator_epochs: usize,
    /// Threshold multiplier `alpha`.
    pub alpha: f64,
    pub latent_dim: usize,
    pub discriminator_lr: f64,
    pub generator_lr: f64,
    /// Hidden layer width of both networks.
    pub hidden: usize,
    /// Feature maps per convolution of the signal discriminator.
    pub feature_maps: usize,
    pub sampler: SamplerKind,
    pub variant: Variant,
    pub stop: StopCondition,
    pub seed: u64,
}

impl Default for OganConfig {
    fn default() -> Self {
        OganConfig {
            budget: 300,
            initial: 75,
            sample_probability: 0.0,
            batch_size: 32,
            discriminator_epochs: 15,
            generator_epochs: 375,
            alpha: 0.95,
            latent_dim: 20,
            discriminator_lr: 0.005,
            generator_lr: 0.0001,
            hidden: 128,
            feature_maps: 16,
            sampler: SamplerKind::Uniform,
            variant: Variant::Adaptive,
            stop: StopCondition::FirstFalsification,
            seed: 0,
        }
    }
}

impl OganConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::Config(m));
        if self.initial == 0 || self.initial > self.budget {
            return bad(format!(
                "initial sample count must satisfy 0 < N <= E, got N = {}, E = {}",
                self.initial, self.budget
            ));
        }
        if !(0.0..=1.0).contains(&self.sample_probability) {
            return bad(format!("sampling probability must lie in [0, 1], got {}", self.sample_probability));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.latent_dim == 0 || self.batch_size == 0 || self.hidden == 0 || self.feature_maps == 0 {
            return bad("latent dimension, batch size and layer widths must be positive".into());
        }
        if !(self.discriminator_lr > 0.0 && self.generator_lr > 0.0) {
            return bad("learning rates must be positive".into());
        }
        Ok(())
    }
}

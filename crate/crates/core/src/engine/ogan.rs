use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nn::{batch_loss, init_weights_with, models, AdamState, Network, Tensor};
use crate::signal::TestInput;

use super::sampling::sample_uniform;
use super::threshold::{AcceptanceThreshold, CandidateQueue};
use super::{EngineError, OganConfig};

/// Independent random streams derived from one master seed.
#[derive(Debug, Clone)]
pub struct Streams {
    /// Initial phase and every later Monte Carlo draw.
    pub monte_carlo: ChaCha8Rng,
    /// Latent points for generator training and test proposals.
    pub latent: ChaCha8Rng,
    /// Weight initialization.
    pub init: ChaCha8Rng,
    /// The coin deciding between Monte Carlo and generator samples.
    pub coin: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let stream = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            rng
        };
        Streams {
            monte_carlo: stream(0),
            latent: stream(1),
            init: stream(2),
            coin: stream(3),
        }
    }
}

/// Discriminator architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscriminatorKind {
    /// Convolutional, for piecewise-constant signal inputs.
    Convolutional,
    /// Dense, for vector inputs.
    Dense,
}

/// Generator and discriminator trained in one loop iteration.
#[derive(Debug, Clone)]
pub struct Models {
    pub generator: Network<f32>,
    pub discriminator: Network<f32>,
}

/// Falsifier state: the executed test suite with scaled robustness values,
/// the current models and the random streams.
#[derive(Debug, Clone)]
pub struct OganState {
    pub dimension: usize,
    pub discriminator_kind: DiscriminatorKind,
    pub tests: Vec<TestInput>,
    pub robustness: Vec<f64>,
    pub models: Option<Models>,
    pub streams: Streams,
}

impl OganState {
    pub fn new(dimension: usize, discriminator_kind: DiscriminatorKind, seed: u64) -> Self {
        OganState {
            dimension,
            discriminator_kind,
            tests: Vec::new(),
            robustness: Vec::new(),
            models: None,
            streams: Streams::new(seed),
        }
    }

    pub fn push(&mut self, test: TestInput, robustness: f64) {
        self.tests.push(test);
        self.robustness.push(robustness);
    }
}

fn to_tensor(tests: &[TestInput]) -> Result<Tensor<f32>, EngineError> {
    let d = tests.first().map_or(0, TestInput::dimension);
    let data = tests.iter().flat_map(|t| t.as_slice().iter().map(|&v| v as f32)).collect();
    Ok(Tensor::new(vec![tests.len(), d], data)?)
}

fn latent_batch(rng: &mut ChaCha8Rng, batch: usize, dim: usize) -> Result<Tensor<f32>, EngineError> {
    let data = (0..batch * dim).map(|_| rng.random_range(-1.0f32..=1.0)).collect();
    Ok(Tensor::new(vec![batch, dim], data)?)
}

/// Fits `net` to `(tests, targets)` for `epochs` full-batch steps and returns
/// the loss before each step.
pub fn train_discriminator(
    net: &mut Network<f32>,
    opt: &mut AdamState<f32>,
    tests: &[TestInput],
    targets: &[f64],
    epochs: usize,
) -> Result<Vec<f64>, EngineError> {
    let x = to_tensor(tests)?;
    let mut losses = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        let p = net.forward(&x)?;
        let (loss, grad) = batch_loss(&p, targets)?;
        net.backward(&grad)?;
        opt.step(net);
        losses.push(loss);
    }
    Ok(losses)
}

/// Trains `generator` so that the frozen `discriminator` predicts robustness
/// 0 on its outputs.
pub fn train_generator(
    generator: &mut Network<f32>,
    discriminator: &mut Network<f32>,
    opt: &mut AdamState<f32>,
    rng: &mut ChaCha8Rng,
    config: &OganConfig,
) -> Result<(), EngineError> {
    discriminator.set_frozen(true);
    let zeros = vec![0.0; config.batch_size];
    for _ in 0..config.generator_epochs {
        let z = latent_batch(rng, config.batch_size, config.latent_dim)?;
        let x = generator.forward(&z)?;
        let p = discriminator.forward(&x)?;
        let (_, grad) = batch_loss(&p, &zeros)?;
        let gx = discriminator.backward(&grad)?;
        generator.backward(&gx)?;
        opt.step(generator);
    }
    discriminator.zero_grad();
    Ok(())
}

/// Reinitializes both networks and trains them on the current test suite.
pub fn train_models(state: &mut OganState, config: &OganConfig) -> Result<(), EngineError> {
    if state.tests.is_empty() {
        return Err(EngineError::Config("cannot train on an empty test suite".into()));
    }
    let d = state.dimension;
    let mut generator = models::generator::<f32>(config.latent_dim, config.hidden, d);
    let mut discriminator = match state.discriminator_kind {
        DiscriminatorKind::Convolutional => models::conv_discriminator::<f32>(d, config.feature_maps, config.hidden),
        DiscriminatorKind::Dense => models::dense_discriminator::<f32>(d, config.hidden),
    };
    init_weights_with(&mut generator, &mut state.streams.init);
    init_weights_with(&mut discriminator, &mut state.streams.init);

    let mut d_opt = AdamState::new(&discriminator, config.discriminator_lr);
    train_discriminator(
        &mut discriminator,
        &mut d_opt,
        &state.tests,
        &state.robustness,
        config.discriminator_epochs,
    )?;
    let mut g_opt = AdamState::new(&generator, config.generator_lr);
    train_generator(&mut generator, &mut discriminator, &mut g_opt, &mut state.streams.latent, config)?;
    state.models = Some(Models {
        generator,
        discriminator,
    });
    Ok(())
}

/// Where a sampled test came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub test: TestInput,
    /// Discriminator estimate of a generated test; `None` for Monte Carlo.
    pub estimate: Option<f64>,
    /// Candidates pushed to the queue (0 for Monte Carlo).
    pub candidates: usize,
}

/// One Monte Carlo test from the configured stream (single draws are uniform).
pub fn monte_carlo_test(state: &mut OganState) -> TestInput {
    sample_uniform(state.dimension, 1, &mut state.streams.monte_carlo).remove(0)
}

/// The SAMPLE_TEST procedure: a Monte Carlo test with probability `P`,
/// otherwise a generated test accepted by the geometric threshold.
pub fn sample_test(state: &mut OganState, config: &OganConfig) -> Result<Sampled, EngineError> {
    let coin: f64 = state.streams.coin.random();
    if coin < config.sample_probability {
        return Ok(Sampled {
            test: monte_carlo_test(state),
            estimate: None,
            candidates: 0,
        });
    }
    generated_test(state, config)
}

/// Generator branch of SAMPLE_TEST: proposes candidates into a fresh
/// min-queue until the smallest estimate is below the threshold.
pub fn generated_test(state: &mut OganState, config: &OganConfig) -> Result<Sampled, EngineError> {
    let models = state
        .models
        .as_ref()
        .ok_or_else(|| EngineError::Config("models must be trained before sampling".into()))?;
    let mut queue = CandidateQueue::default();
    let mut threshold = AcceptanceThreshold::new(config.alpha);
    loop {
        let z = latent_batch(&mut state.streams.latent, 1, config.latent_dim)?;
        let x = models.generator.predict(&z)?;
        let estimate = models.discriminator.predict(&x)?.data()[0] as f64;
        queue.push(estimate, x.row_f64(0));
        threshold.advance();
        if queue.min_estimate().is_some_and(|m| m <= threshold.value()) {
            break;
        }
    }
    let candidates = queue.len();
    let (estimate, x) = queue.pop_min().expect("queue is nonempty");
    Ok(Sampled {
        test: TestInput::new(x),
        estimate: Some(estimate),
        candidates,
    })
}

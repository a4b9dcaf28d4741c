use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::par;
use crate::signal::TestInput;
use crate::stl::{eval_boolean, eval_robustness, Formula, SignalRanges, StlError};
use crate::sut::SutDescriptor;

use super::ogan::{generated_test, monte_carlo_test, sample_test, train_models, DiscriminatorKind, OganState};
use super::sampling::{sample_lhs, sample_uniform};
use super::{EngineError, OganConfig, SamplerKind, StopCondition, Variant};

/// A SUT paired with the requirement to falsify.
#[derive(Debug, Clone)]
pub struct Problem {
    pub sut: SutDescriptor,
    pub requirement: Formula,
    pub ranges: SignalRanges,
}

/// Verdict and robustness of one executed test.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub scaled: f64,
    pub value: f64,
    pub falsified: bool,
    pub wall_time: Duration,
}

impl Problem {
    /// Checks that every signal of `requirement` has a declared range.
    pub fn new(sut: SutDescriptor, requirement: Formula) -> Result<Self, EngineError> {
        let ranges = sut.ranges();
        for s in requirement.signals() {
            if !ranges.contains_key(&s) {
                return Err(StlError::MissingRange(s).into());
            }
        }
        Ok(Problem {
            sut,
            requirement,
            ranges,
        })
    }

    /// The SUT with its default requirement.
    pub fn with_default_requirement(sut: SutDescriptor) -> Result<Self, EngineError> {
        let req = sut.default_requirement()?;
        Problem::new(sut, req)
    }

    pub fn dimension(&self) -> usize {
        self.sut.dimension()
    }

    /// Executes `test` and evaluates the requirement at time 0.
    pub fn evaluate(&self, test: &TestInput) -> Result<Evaluation, EngineError> {
        let start = Instant::now();
        let execution = self.sut.execute(test).map_err(EngineError::sut)?;
        let r = eval_robustness(&self.requirement, &execution.trace, &self.ranges, 0)?;
        let holds = eval_boolean(&self.requirement, &execution.trace, 0)?;
        Ok(Evaluation {
            scaled: r.scaled,
            value: r.value,
            falsified: !holds,
            wall_time: start.elapsed(),
        })
    }

    fn discriminator_kind(&self) -> DiscriminatorKind {
        if self.sut.input.is_vector() {
            DiscriminatorKind::Dense
        } else {
            DiscriminatorKind::Convolutional
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Initial Monte Carlo phase.
    Initial,
    /// Monte Carlo draw after the initial phase.
    MonteCarlo,
    /// Proposed by the generator.
    Generator,
}

/// One executed test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    /// Budget position (1-based) charged for this test.
    pub execution: usize,
    pub input: TestInput,
    pub origin: Origin,
    pub robustness: f64,
    pub raw_robustness: f64,
    pub falsified: bool,
    /// Whether the test entered the discriminator training data.
    pub trained_on: bool,
    /// Discriminator estimate when the test was generated.
    pub estimate: Option<f64>,
}

/// Wall-clock seconds spent on one test.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TestTiming {
    pub generation: f64,
    pub training: f64,
    pub execution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsificationOutcome {
    pub falsified: bool,
    /// Executions up to and including the first falsification, or the budget
    /// when censored.
    pub executions: usize,
    pub executions_used: usize,
    pub budget: usize,
    pub falsifying_input: Option<TestInput>,
    pub tests: Vec<TestRecord>,
    /// Per-test timings aligned with `tests`.
    pub timings: Vec<TestTiming>,
}

impl FalsificationOutcome {
    fn new(budget: usize) -> Self {
        FalsificationOutcome {
            falsified: false,
            executions: budget,
            executions_used: 0,
            budget,
            falsifying_input: None,
            tests: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn censored(&self) -> bool {
        !self.falsified
    }

    fn record(&mut self, record: TestRecord, timing: TestTiming, counts_as_event: bool) {
        if counts_as_event && record.falsified && !self.falsified {
            self.falsified = true;
            self.executions = record.execution;
            self.falsifying_input = Some(record.input.clone());
        }
        self.tests.push(record);
        self.timings.push(timing);
    }
}

/// Tests evaluated together in one parallel batch.
const BATCH: usize = 16;

/// Executes Monte Carlo `tests` in order, `BATCH` at a time in parallel,
/// stopping after the first falsification when requested. Tests after that
/// point are neither recorded nor charged.
fn run_batch(
    problem: &Problem,
    tests: Vec<TestInput>,
    origin: Origin,
    stop: StopCondition,
    generation: f64,
    outcome: &mut FalsificationOutcome,
    mut on_record: impl FnMut(&TestInput, f64),
) -> Result<bool, EngineError> {
    for chunk in tests.chunks(BATCH) {
        let results = par::map(chunk, |t| problem.evaluate(t));
        for (test, result) in chunk.iter().zip(results) {
            let e = result.map_err(|err| err.with_partial(outcome))?;
            outcome.executions_used += 1;
            on_record(test, e.scaled);
            outcome.record(
                TestRecord {
                    execution: outcome.executions_used,
                    input: test.clone(),
                    origin,
                    robustness: e.scaled,
                    raw_robustness: e.value,
                    falsified: e.falsified,
                    trained_on: origin != Origin::Generator,
                    estimate: None,
                },
                TestTiming {
                    generation,
                    training: 0.0,
                    execution: e.wall_time.as_secs_f64(),
                },
                true,
            );
            if outcome.falsified && stop == StopCondition::FirstFalsification {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn initial_sample(state: &mut OganState, config: &OganConfig, n: usize) -> Vec<TestInput> {
    match config.sampler {
        SamplerKind::Uniform => sample_uniform(state.dimension, n, &mut state.streams.monte_carlo),
        SamplerKind::LatinHypercube => sample_lhs(state.dimension, n, &mut state.streams.monte_carlo),
    }
}

fn initial_phase(
    problem: &Problem,
    config: &OganConfig,
    state: &mut OganState,
    outcome: &mut FalsificationOutcome,
) -> Result<bool, EngineError> {
    let start = Instant::now();
    let tests = initial_sample(state, config, config.initial);
    let generation = start.elapsed().as_secs_f64() / config.initial as f64;
    run_batch(problem, tests, Origin::Initial, config.stop, generation, outcome, |t, r| {
        state.push(t.clone(), r)
    })
}

fn check(problem: &Problem, config: &OganConfig) -> Result<(), EngineError> {
    config.validate()?;
    if problem.dimension() == 0 {
        return Err(EngineError::Config("SUT has an empty input space".into()));
    }
    Ok(())
}

/// Runs the variant selected in `config`.
pub fn run_ogan(problem: &Problem, config: &OganConfig) -> Result<FalsificationOutcome, EngineError> {
    match config.variant {
        Variant::Adaptive => run_falsification(problem, config),
        Variant::Nonadaptive => run_nonadaptive(problem, config),
    }
}

/// The OGAN main loop: `N` Monte Carlo tests, then repeatedly retrain both
/// models, sample a test, execute it and add it to the training data.
pub fn run_falsification(problem: &Problem, config: &OganConfig) -> Result<FalsificationOutcome, EngineError> {
    check(problem, config)?;
    let mut state = OganState::new(problem.dimension(), problem.discriminator_kind(), config.seed);
    let mut outcome = FalsificationOutcome::new(config.budget);
    if initial_phase(problem, config, &mut state, &mut outcome)? {
        return Ok(outcome);
    }
    while outcome.executions_used < config.budget {
        let start = Instant::now();
        train_models(&mut state, config).map_err(|e| e.with_partial(&outcome))?;
        let training = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let sampled = sample_test(&mut state, config).map_err(|e| e.with_partial(&outcome))?;
        let generation = start.elapsed().as_secs_f64();
        let e = problem.evaluate(&sampled.test).map_err(|e| e.with_partial(&outcome))?;
        outcome.executions_used += 1;
        state.push(sampled.test.clone(), e.scaled);
        outcome.record(
            TestRecord {
                execution: outcome.executions_used,
                input: sampled.test,
                origin: if sampled.estimate.is_some() {
                    Origin::Generator
                } else {
                    Origin::MonteCarlo
                },
                robustness: e.scaled,
                raw_robustness: e.value,
                falsified: e.falsified,
                trained_on: true,
                estimate: sampled.estimate,
            },
            TestTiming {
                generation,
                training,
                execution: e.wall_time.as_secs_f64(),
            },
            true,
        );
        if outcome.falsified && config.stop == StopCondition::FirstFalsification {
            break;
        }
    }
    Ok(outcome)
}

/// Nonadaptive ablation: each iteration executes a Monte Carlo test `t1`
/// (added to the training data) and a generated test `t2` (never trained
/// on). The pair is charged as one execution and only `t2` can end the run.
pub fn run_nonadaptive(problem: &Problem, config: &OganConfig) -> Result<FalsificationOutcome, EngineError> {
    check(problem, config)?;
    let mut state = OganState::new(problem.dimension(), problem.discriminator_kind(), config.seed);
    let mut outcome = FalsificationOutcome::new(config.budget);
    if initial_phase(problem, config, &mut state, &mut outcome)? {
        return Ok(outcome);
    }
    while outcome.executions_used < config.budget {
        let start = Instant::now();
        train_models(&mut state, config).map_err(|e| e.with_partial(&outcome))?;
        let training = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let generated = generated_test(&mut state, config).map_err(|e| e.with_partial(&outcome))?;
        let generation = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let random = monte_carlo_test(&mut state);
        let random_generation = start.elapsed().as_secs_f64();

        let pair = [random.clone(), generated.test.clone()];
        let mut results = par::map(&pair, |t| problem.evaluate(t)).into_iter();
        let e1 = results.next().expect("two results").map_err(|e| e.with_partial(&outcome))?;
        let e2 = results.next().expect("two results").map_err(|e| e.with_partial(&outcome))?;
        outcome.executions_used += 1;
        let execution = outcome.executions_used;

        state.push(random.clone(), e1.scaled);
        outcome.record(
            TestRecord {
                execution,
                input: random,
                origin: Origin::MonteCarlo,
                robustness: e1.scaled,
                raw_robustness: e1.value,
                falsified: e1.falsified,
                trained_on: true,
                estimate: None,
            },
            TestTiming {
                generation: random_generation,
                training: 0.0,
                execution: e1.wall_time.as_secs_f64(),
            },
            false,
        );
        outcome.record(
            TestRecord {
                execution,
                input: generated.test,
                origin: Origin::Generator,
                robustness: e2.scaled,
                raw_robustness: e2.value,
                falsified: e2.falsified,
                trained_on: false,
                estimate: generated.estimate,
            },
            TestTiming {
                generation,
                training,
                execution: e2.wall_time.as_secs_f64(),
            },
            true,
        );
        if outcome.falsified && config.stop == StopCondition::FirstFalsification {
            break;
        }
    }
    Ok(outcome)
}

/// Random search baseline drawing `budget` tests from the Monte Carlo stream
/// of `seed`, so its first `N` tests coincide with OGAN's initial phase.
pub fn run_random_search(
    problem: &Problem,
    budget: usize,
    sampler: SamplerKind,
    stop: StopCondition,
    seed: u64,
) -> Result<FalsificationOutcome, EngineError> {
    if budget == 0 {
        return Err(EngineError::Config("budget must be positive".into()));
    }
    let mut state = OganState::new(problem.dimension(), problem.discriminator_kind(), seed);
    let config = OganConfig {
        sampler,
        ..OganConfig::default()
    };
    let start = Instant::now();
    let tests = initial_sample(&mut state, &config, budget);
    let generation = start.elapsed().as_secs_f64() / budget as f64;
    let mut outcome = FalsificationOutcome::new(budget);
    run_batch(problem, tests, Origin::Initial, stop, generation, &mut outcome, |_, _| {})?;
    Ok(outcome)
}

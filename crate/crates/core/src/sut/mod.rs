//! Systems under test: deterministic maps from test inputs to traces.

mod bench;
mod external;
mod ode;

pub use bench::{
    basin_falsifying_fraction, sut_deceptive_ridge, sut_deceptive_ridge_with, sut_first_order_speed,
    sut_quadratic_basin, RidgeParameters, BASIN_OUTPUT, SPEED_DURATION, SPEED_PERIOD, SPEED_RANGE,
    THROTTLE_SEGMENTS,
};
pub use external::ExternalProcess;
pub use ode::{integrate_rk4, OdeSystem};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{to_signals, InputSpec, SignalError, TestInput};
use crate::stl::{parse_stl, Formula, SignalRange, SignalRanges, StlError, Trace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SutError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Trace(#[from] StlError),
    #[error("state became non-finite at time {time}")]
    NonFinite { time: f64 },
    #[error("input component `{0}` missing from the input trace")]
    MissingInput(String),
    #[error("invalid SUT parameters: {0}")]
    InvalidParameters(String),
    #[error("external SUT failed: {0}")]
    External(String),
    #[error("unknown SUT `{0}`")]
    Unknown(String),
}

/// Deterministic simulation from input signals to output signals.
pub trait Simulator: Send + Sync {
    fn simulate(&self, inputs: &Trace) -> Result<Trace, SutError>;
}

/// A system under test with its input shape, output ranges and default
/// requirement.
#[derive(Clone)]
pub struct SutDescriptor {
    pub name: String,
    pub input: InputSpec,
    pub outputs: Vec<(String, SignalRange)>,
    /// Requirement text checked when the configuration names none.
    pub requirement: String,
    pub simulator: Arc<dyn Simulator>,
}

impl fmt::Debug for SutDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SutDescriptor")
            .field("name", &self.name)
            .field("input", &self.input)
            .field("outputs", &self.outputs)
            .field("requirement", &self.requirement)
            .finish_non_exhaustive()
    }
}

/// Result of one SUT execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    /// Input and output components on a common grid.
    pub trace: Trace,
    pub wall_time: Duration,
}

impl SutDescriptor {
    /// Runs the system on `test` and returns the combined input/output trace.
    pub fn execute(&self, test: &TestInput) -> Result<Execution, SutError> {
        let start = Instant::now();
        let mut trace = to_signals(test, &self.input)?;
        let outputs = self.simulator.simulate(&trace)?;
        trace.merge(&outputs)?;
        Ok(Execution {
            trace,
            wall_time: start.elapsed(),
        })
    }

    /// Declared ranges of every input and output component.
    pub fn ranges(&self) -> SignalRanges {
        let mut ranges: SignalRanges = self.input.channels.iter().map(|c| (c.name.clone(), c.range)).collect();
        ranges.extend(self.outputs.iter().cloned());
        ranges
    }

    pub fn default_requirement(&self) -> Result<Formula, StlError> {
        parse_stl(&self.requirement)
    }

    pub fn dimension(&self) -> usize {
        self.input.dimension()
    }
}

/// Serializable description of a SUT, as named in experiment configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SutSpec {
    QuadraticBasin {
        center: [f64; 3],
        radius: f64,
    },
    FirstOrderSpeed,
    DeceptiveRidge {
        #[serde(default)]
        window_start: Option<f64>,
        #[serde(default)]
        band: Option<[f64; 2]>,
    },
    External {
        command: String,
        #[serde(default)]
        args: Vec<String>,
        input: InputSpec,
        outputs: BTreeMap<String, SignalRange>,
        requirement: String,
    },
}

impl SutSpec {
    pub fn build(&self) -> Result<SutDescriptor, SutError> {
        match self {
            SutSpec::QuadraticBasin { center, radius } => sut_quadratic_basin(*center, *radius),
            SutSpec::FirstOrderSpeed => Ok(sut_first_order_speed()),
            SutSpec::DeceptiveRidge { window_start, band } => {
                let d = RidgeParameters::default();
                let [band_lo, band_hi] = band.unwrap_or([d.band_lo, d.band_hi]);
                sut_deceptive_ridge_with(RidgeParameters {
                    window_start: window_start.unwrap_or(d.window_start),
                    band_lo,
                    band_hi,
                })
            }
            SutSpec::External {
                command,
                args,
                input,
                outputs,
                requirement,
            } => {
                input.validate()?;
                Ok(SutDescriptor {
                    name: command.clone(),
                    input: input.clone(),
                    outputs: outputs.iter().map(|(k, v)| (k.clone(), *v)).collect(),
                    requirement: requirement.clone(),
                    simulator: Arc::new(ExternalProcess {
                        command: command.clone(),
                        args: args.clone(),
                    }),
                })
            }
        }
    }
}

/// Built-in SUTs by name: `sut-a` / `quadratic-basin` (center 0, radius
/// 0.15), `sut-b` / `first-order-speed`, `sut-c` / `deceptive-ridge`.
pub fn builtin(name: &str) -> Result<SutDescriptor, SutError> {
    match name {
        "sut-a" | "quadratic-basin" => sut_quadratic_basin([0.0; 3], 0.15),
        "sut-b" | "first-order-speed" => Ok(sut_first_order_speed()),
        "sut-c" | "deceptive-ridge" => Ok(sut_deceptive_ridge()),
        other => Err(SutError::Unknown(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::normalize;
    use crate::stl::{eval_boolean, eval_robustness};

    fn throttle(values: [f64; 6]) -> TestInput {
        let r = SignalRange::new(0.0, 100.0).unwrap();
        TestInput::new(values.iter().map(|&v| normalize(v, r)).collect())
    }

    #[test]
    fn basin_center_falsifies() {
        let sut = sut_quadratic_basin([0.2, -0.1, 0.3], 0.15).unwrap();
        let trace = sut.execute(&TestInput::new(vec![0.2, -0.1, 0.3])).unwrap().trace;
        assert_eq!(trace.len(), 2);
        assert!(trace.get("y").unwrap().iter().all(|&y| y < 1e-15));
        let req = sut.default_requirement().unwrap();
        assert!(!eval_boolean(&req, &trace, 0).unwrap());
        assert_eq!(eval_robustness(&req, &trace, &sut.ranges(), 0).unwrap().scaled, 0.0);
    }

    #[test]
    fn basin_far_point_satisfies() {
        let sut = sut_quadratic_basin([0.0; 3], 0.15).unwrap();
        let trace = sut.execute(&TestInput::new(vec![0.3, 0.0, 0.0])).unwrap().trace;
        assert!((trace.get("y").unwrap()[0] - 0.3).abs() < 1e-15);
        let r = eval_robustness(&sut.default_requirement().unwrap(), &trace, &sut.ranges(), 0).unwrap();
        assert!(r.scaled > 0.0);
    }

    #[test]
    fn basin_rejects_ball_outside_cube() {
        assert!(sut_quadratic_basin([0.9, 0.0, 0.0], 0.15).is_err());
        assert!(sut_quadratic_basin([0.0; 3], 0.0).is_err());
    }

    #[test]
    fn speed_zero_throttle() {
        let sut = sut_first_order_speed();
        let trace = sut.execute(&throttle([0.0; 6])).unwrap().trace;
        assert_eq!(trace.len(), 3001);
        assert!(trace.get("v").unwrap().iter().all(|&v| v == 0.0));
        let r = eval_robustness(&sut.default_requirement().unwrap(), &trace, &sut.ranges(), 0).unwrap();
        assert_eq!(r.value, 120.0);
    }

    #[test]
    fn speed_full_throttle_matches_analytic_solution() {
        let sut = sut_first_order_speed();
        let trace = sut.execute(&throttle([100.0; 6])).unwrap().trace;
        let v = trace.get("v").unwrap();
        let exact = 500.0 * (1.0 - (-0.3f64).exp());
        assert!((v[3000] - exact).abs() < 1e-6);
        assert!((exact - 129.59).abs() < 0.005);
        assert!(!eval_boolean(&sut.default_requirement().unwrap(), &trace, 0).unwrap());
    }

    #[test]
    fn speed_eighty_percent_satisfies() {
        let sut = sut_first_order_speed();
        let trace = sut.execute(&throttle([80.0; 6])).unwrap().trace;
        let max = trace.get("v").unwrap().iter().copied().fold(f64::MIN, f64::max);
        assert!((max - 400.0 * (1.0 - (-0.3f64).exp())).abs() < 1e-6);
        assert!((max - 103.67).abs() < 0.005);
        assert!(eval_boolean(&sut.default_requirement().unwrap(), &trace, 0).unwrap());
    }

    #[test]
    fn ridge_zero_and_full_throttle_satisfy() {
        let sut = sut_deceptive_ridge();
        let req = sut.default_requirement().unwrap();
        for value in [0.0, 100.0] {
            let trace = sut.execute(&throttle([value; 6])).unwrap().trace;
            assert!(eval_boolean(&req, &trace, 0).unwrap());
        }
    }

    #[test]
    fn execution_is_deterministic() {
        let sut = sut_first_order_speed();
        let test = throttle([10.0, 90.0, 30.0, 70.0, 50.0, 20.0]);
        assert_eq!(sut.execute(&test).unwrap().trace, sut.execute(&test).unwrap().trace);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let sut = sut_first_order_speed();
        assert!(matches!(
            sut.execute(&TestInput::new(vec![0.0; 3])),
            Err(SutError::Signal(SignalError::DimensionMismatch { expected: 6, got: 3 }))
        ));
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let spec = SutSpec::DeceptiveRidge {
            window_start: Some(15.0),
            band: Some([45.0, 50.0]),
        };
        let text = toml::to_string(&spec).unwrap();
        assert_eq!(toml::from_str::<SutSpec>(&text).unwrap(), spec);
        let sut = spec.build().unwrap();
        assert_eq!(sut.requirement, "not (always[15,30] ((v >= 45) and (v <= 50)))");
        sut.default_requirement().unwrap();
    }

    #[test]
    fn builtin_names() {
        for n in ["sut-a", "sut-b", "sut-c"] {
            builtin(n).unwrap().default_requirement().unwrap();
        }
        assert!(matches!(builtin("nope"), Err(SutError::Unknown(_))));
    }
}

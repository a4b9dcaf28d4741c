//! Built-in benchmark systems with analytically characterized falsifying sets.

use std::sync::Arc;

use crate::signal::{InputChannel, InputSpec};
use crate::stl::{SignalRange, Trace};

use super::ode::{integrate_rk4, OdeSystem};
use super::{Simulator, SutDescriptor, SutError};

/// Range declared for every SUT-A input coordinate.
pub const BASIN_INPUT: (f64, f64) = (-1.0, 1.0);
/// Declared range of the SUT-A output; contains the cube diameter `2 sqrt 3`.
pub const BASIN_OUTPUT: (f64, f64) = (0.0, 3.5);
/// Declared range of the speed output of SUT-B and SUT-C.
pub const SPEED_RANGE: (f64, f64) = (0.0, 130.0);
/// Throttle segments, duration and sampling period of SUT-B and SUT-C.
pub const THROTTLE_SEGMENTS: usize = 6;
pub const SPEED_DURATION: f64 = 30.0;
pub const SPEED_PERIOD: f64 = 0.01;

fn range(r: (f64, f64)) -> SignalRange {
    SignalRange::new(r.0, r.1).expect("constant range is valid")
}

struct Basin {
    center: [f64; 3],
}

impl Simulator for Basin {
    fn simulate(&self, inputs: &Trace) -> Result<Trace, SutError> {
        let mut dist2 = 0.0;
        for (i, c) in self.center.iter().enumerate() {
            let name = format!("u{}", i + 1);
            let u = inputs.get(&name).ok_or(SutError::MissingInput(name))?;
            dist2 += (u[0] - c).powi(2);
        }
        Ok(Trace::from_columns(inputs.dt(), vec![("y".into(), vec![dist2.sqrt(); inputs.len()])])?)
    }
}

/// SUT-A: `y = |u - center|` over `u in [-1, 1]^3`, requirement
/// `always[0,1] (y > radius)`. The falsifying set is the closed ball.
pub fn sut_quadratic_basin(center: [f64; 3], radius: f64) -> Result<SutDescriptor, SutError> {
    if !(radius > 0.0) {
        return Err(SutError::InvalidParameters(format!("radius must be positive, got {radius}")));
    }
    if center.iter().any(|c| c - radius < BASIN_INPUT.0 || c + radius > BASIN_INPUT.1) {
        return Err(SutError::InvalidParameters(format!(
            "ball of radius {radius} around {center:?} leaves the input cube"
        )));
    }
    let channels = (1..=3).map(|i| InputChannel::vector(format!("u{i}"), range(BASIN_INPUT))).collect();
    Ok(SutDescriptor {
        name: "quadratic-basin".into(),
        input: InputSpec::vector(channels)?,
        outputs: vec![("y".into(), range(BASIN_OUTPUT))],
        requirement: format!("always[0,1] (y > {radius})"),
        simulator: Arc::new(Basin { center }),
    })
}

/// Fraction of the input cube occupied by the SUT-A falsifying ball.
pub fn basin_falsifying_fraction(radius: f64) -> f64 {
    4.0 / 3.0 * std::f64::consts::PI * radius.powi(3) / 8.0
}

struct Speed {
    system: OdeSystem,
}

impl Simulator for Speed {
    fn simulate(&self, inputs: &Trace) -> Result<Trace, SutError> {
        let duration = (inputs.len() - 1) as f64 * inputs.dt();
        integrate_rk4(&self.system, inputs, duration)
    }
}

fn speed_system() -> OdeSystem {
    OdeSystem::new(vec!["v".into()], vec!["throttle".into()], vec![0.0], SPEED_PERIOD, |v, u, _, dv| {
        dv[0] = 0.05 * u[0] - 0.01 * v[0]
    })
    .expect("valid system")
}

fn speed_descriptor(name: &str, requirement: String) -> Result<SutDescriptor, SutError> {
    let input = InputSpec::new(
        vec![InputChannel::signal("throttle", range((0.0, 100.0)), THROTTLE_SEGMENTS)],
        SPEED_DURATION,
        SPEED_PERIOD,
    )?;
    Ok(SutDescriptor {
        name: name.into(),
        input,
        outputs: vec![("v".into(), range(SPEED_RANGE))],
        requirement,
        simulator: Arc::new(Speed { system: speed_system() }),
    })
}

/// SUT-B: `v' = 0.05 u - 0.01 v`, `v(0) = 0`, six throttle segments on
/// `[0, 100]` over 30 time units; requirement `always[0,30] (v < 120)`.
pub fn sut_first_order_speed() -> SutDescriptor {
    speed_descriptor("first-order-speed", "always[0,30] (v < 120)".into()).expect("valid descriptor")
}

/// Window start and speed band of SUT-C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeParameters {
    pub window_start: f64,
    pub band_lo: f64,
    pub band_hi: f64,
}

impl Default for RidgeParameters {
    fn default() -> Self {
        RidgeParameters {
            window_start: 15.0,
            band_lo: 45.0,
            band_hi: 50.0,
        }
    }
}

/// SUT-C: SUT-B dynamics with the band-holding requirement
/// `not (always[a,30] ((v >= lo) and (v <= hi)))`.
///
/// Falsification needs the speed held inside a narrow band for the rest of
/// the run, which requires coordinated segment values: no constant throttle
/// does it (reaching 45 by t = 15 needs u >= 64.6, staying under 50 at t = 30
/// needs u <= 38.6). With window `[10, 30]` and band `[50, 60]` the problem
/// is infeasible, since even full throttle gives `v(10) = 47.6`.
pub fn sut_deceptive_ridge() -> SutDescriptor {
    sut_deceptive_ridge_with(RidgeParameters::default()).expect("default parameters are valid")
}

pub fn sut_deceptive_ridge_with(p: RidgeParameters) -> Result<SutDescriptor, SutError> {
    if !(p.band_lo < p.band_hi && p.window_start >= 0.0 && p.window_start <= SPEED_DURATION) {
        return Err(SutError::InvalidParameters(format!("invalid ridge parameters {p:?}")));
    }
    speed_descriptor(
        "deceptive-ridge",
        format!(
            "not (always[{},{}] ((v >= {}) and (v <= {})))",
            p.window_start, SPEED_DURATION, p.band_lo, p.band_hi
        ),
    )
}

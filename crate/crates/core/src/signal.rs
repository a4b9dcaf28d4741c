//! Normalized search space `[-1, 1]^D` and its mapping to piecewise-constant
//! input signals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stl::{SignalRange, StlError, Trace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("test has dimension {got}, input specification expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Trace(#[from] StlError),
}

/// Maps `value` in `[A, B]` linearly onto `[-1, 1]`.
pub fn normalize(value: f64, range: SignalRange) -> f64 {
    let (a, b) = (range.lo(), range.hi());
    (-2.0 * value + a + b) / (a - b)
}

/// Inverse of [`normalize`].
pub fn denormalize(x: f64, range: SignalRange) -> f64 {
    let (a, b) = (range.lo(), range.hi());
    (x * (a - b) - a - b) / -2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    /// Piecewise-constant signal with equal-length pieces.
    #[default]
    Signal,
    /// A single scalar held for the whole (one-step) execution.
    Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputChannel {
    pub name: String,
    pub range: SignalRange,
    #[serde(default = "one")]
    pub segments: usize,
    #[serde(default)]
    pub kind: ChannelKind,
}

fn one() -> usize {
    1
}

impl InputChannel {
    pub fn signal(name: impl Into<String>, range: SignalRange, segments: usize) -> Self {
        InputChannel {
            name: name.into(),
            range,
            segments,
            kind: ChannelKind::Signal,
        }
    }

    pub fn vector(name: impl Into<String>, range: SignalRange) -> Self {
        InputChannel {
            name: name.into(),
            range,
            segments: 1,
            kind: ChannelKind::Vector,
        }
    }
}

/// Shape of a system's inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub channels: Vec<InputChannel>,
    /// Length of an execution in time units.
    pub duration: f64,
    /// Sampling period in seconds.
    pub period: f64,
}

impl InputSpec {
    pub fn new(channels: Vec<InputChannel>, duration: f64, period: f64) -> Result<Self, SignalError> {
        let spec = InputSpec {
            channels,
            duration,
            period,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Spec for pure vector inputs: each channel is held for one sample step.
    pub fn vector(channels: Vec<InputChannel>) -> Result<Self, SignalError> {
        let channels = channels
            .into_iter()
            .map(|c| InputChannel {
                segments: 1,
                kind: ChannelKind::Vector,
                ..c
            })
            .collect();
        InputSpec::new(channels, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.channels.is_empty() {
            return Err(SignalError::InvalidSpec("no input channels".into()));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(SignalError::InvalidSpec(format!("duration must be positive, got {}", self.duration)));
        }
        if !(self.period > 0.0 && self.period <= self.duration) {
            return Err(SignalError::InvalidSpec(format!(
                "period must lie in (0, duration], got {}",
                self.period
            )));
        }
        for c in &self.channels {
            if c.segments == 0 {
                return Err(SignalError::InvalidSpec(format!("channel `{}` has zero segments", c.name)));
            }
            if c.kind == ChannelKind::Vector && c.segments != 1 {
                return Err(SignalError::InvalidSpec(format!("vector channel `{}` must have one segment", c.name)));
            }
            SignalRange::new(c.range.lo(), c.range.hi())?;
        }
        Ok(())
    }

    /// Dimension `D` of the normalized search space.
    pub fn dimension(&self) -> usize {
        self.channels.iter().map(|c| c.segments).sum()
    }

    /// True when every channel is a scalar rather than a time signal.
    pub fn is_vector(&self) -> bool {
        self.channels.iter().all(|c| c.kind == ChannelKind::Vector)
    }

    /// Number of samples in a generated signal.
    pub fn samples(&self) -> usize {
        (self.duration / self.period + 1e-9).floor() as usize + 1
    }

    /// Segment owning sample `i` of a channel with `segments` pieces.
    fn segment_of(&self, i: usize, segments: usize) -> usize {
        let pos = i as f64 * self.period * segments as f64 / self.duration;
        ((pos + 1e-9).floor() as usize).min(segments - 1)
    }
}

/// A point of the normalized search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestInput(Vec<f64>);

impl TestInput {
    /// Wraps `values`, clamping each into `[-1, 1]`.
    pub fn new(values: Vec<f64>) -> Self {
        TestInput(values.into_iter().map(|v| v.clamp(-1.0, 1.0)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Expands a normalized test into its piecewise-constant input signals.
pub fn to_signals(test: &TestInput, spec: &InputSpec) -> Result<Trace, SignalError> {
    let d = spec.dimension();
    if test.dimension() != d {
        return Err(SignalError::DimensionMismatch {
            expected: d,
            got: test.dimension(),
        });
    }
    let n = spec.samples();
    let mut trace = Trace::new(spec.period)?;
    let mut offset = 0;
    for channel in &spec.channels {
        let pieces: Vec<f64> = test.as_slice()[offset..offset + channel.segments]
            .iter()
            .map(|&x| denormalize(x, channel.range))
            .collect();
        offset += channel.segments;
        let values = (0..n)
            .map(|i| pieces[spec.segment_of(i, channel.segments)])
            .collect();
        trace.push(channel.name.clone(), values)?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(lo: f64, hi: f64) -> SignalRange {
        SignalRange::new(lo, hi).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(50.0, r(0.0, 100.0)), 0.0);
        assert_eq!(normalize(0.0, r(0.0, 100.0)), -1.0);
        assert_eq!(normalize(325.0, r(0.0, 325.0)), 1.0);
    }

    #[test]
    fn denormalize_examples() {
        assert_eq!(denormalize(0.0, r(0.0, 100.0)), 50.0);
        assert_eq!(denormalize(1.0, r(0.0, 325.0)), 325.0);
        assert_eq!(denormalize(-1.0, r(50.0, 90.0)), 50.0);
    }

    #[test]
    fn single_segment_constant_signal() {
        let spec = InputSpec::new(vec![InputChannel::signal("u", r(0.0, 100.0), 1)], 30.0, 0.01).unwrap();
        let t = to_signals(&TestInput::new(vec![0.0]), &spec).unwrap();
        assert_eq!(t.len(), 3001);
        assert!(t.get("u").unwrap().iter().all(|&v| v == 50.0));
    }

    #[test]
    fn two_channels_two_constants() {
        let spec = InputSpec::new(
            vec![
                InputChannel::signal("a", r(0.0, 10.0), 1),
                InputChannel::signal("b", r(-1.0, 1.0), 1),
            ],
            2.0,
            0.5,
        )
        .unwrap();
        let t = to_signals(&TestInput::new(vec![1.0, -0.5]), &spec).unwrap();
        assert_eq!(t.get("a").unwrap(), &[10.0; 5]);
        assert_eq!(t.get("b").unwrap(), &[-0.5; 5]);
    }

    #[test]
    fn six_segments_span_five_time_units() {
        let spec = InputSpec::new(vec![InputChannel::signal("throttle", r(0.0, 100.0), 6)], 30.0, 0.01).unwrap();
        let x = TestInput::new(vec![-1.0, -0.6, -0.2, 0.2, 0.6, 1.0]);
        let t = to_signals(&x, &spec).unwrap();
        let u = t.get("throttle").unwrap();
        for (k, expected) in [0.0, 20.0, 40.0, 60.0, 80.0, 100.0].iter().enumerate() {
            let start = k * 500;
            let end = if k == 5 { 3000 } else { start + 499 };
            assert!((u[start] - expected).abs() < 1e-9, "segment {k} start");
            assert!((u[end] - expected).abs() < 1e-9, "segment {k} end");
        }
    }

    #[test]
    fn vector_spec_has_two_samples() {
        let spec = InputSpec::vector(vec![InputChannel::vector("x", r(-1.0, 1.0))]).unwrap();
        assert!(spec.is_vector());
        let t = to_signals(&TestInput::new(vec![0.25]), &spec).unwrap();
        assert_eq!(t.get("x").unwrap(), &[0.25, 0.25]);
    }

    #[test]
    fn dimension_mismatch() {
        let spec = InputSpec::new(vec![InputChannel::signal("u", r(0.0, 1.0), 3)], 3.0, 1.0).unwrap();
        assert!(matches!(
            to_signals(&TestInput::new(vec![0.0]), &spec),
            Err(SignalError::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn invalid_specs() {
        assert!(InputSpec::new(vec![InputChannel::signal("u", r(0.0, 1.0), 0)], 3.0, 1.0).is_err());
        assert!(InputSpec::new(vec![InputChannel::signal("u", r(0.0, 1.0), 1)], 0.0, 1.0).is_err());
        assert!(InputSpec::new(vec![], 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn normalize_inverts_denormalize(x in -1.0f64..=1.0, a in -1e3f64..1e3, w in 1e-3f64..1e3) {
            let range = r(a, a + w);
            let back = normalize(denormalize(x, range), range);
            prop_assert!((back - x).abs() <= 1e-12 * (1.0 + (a.abs() + w) / w));
        }

        #[test]
        fn denormalize_inverts_normalize(t in 0.0f64..=1.0, a in -1e3f64..1e3, w in 1e-3f64..1e3) {
            let range = r(a, a + w);
            let v = a + t * w;
            let back = denormalize(normalize(v, range), range);
            prop_assert!((back - v).abs() <= 1e-12 * (a.abs() + w).max(1.0));
        }

        #[test]
        fn signals_are_piecewise_constant(
            values in proptest::collection::vec(-1.0f64..=1.0, 1..8),
            duration in 1.0f64..40.0,
        ) {
            let segments = values.len();
            let spec = InputSpec::new(vec![InputChannel::signal("u", r(0.0, 1.0), segments)], duration, 0.05).unwrap();
            let t = to_signals(&TestInput::new(values.clone()), &spec).unwrap();
            prop_assert_eq!(t.len(), (duration / 0.05 + 1e-9).floor() as usize + 1);
            let u = t.get("u").unwrap();
            for (i, &v) in u.iter().enumerate() {
                let seg = spec.segment_of(i, segments);
                prop_assert_eq!(v, denormalize(values[seg], r(0.0, 1.0)));
            }
        }
    }
}

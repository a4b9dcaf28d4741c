//! Signal temporal logic: syntax, Boolean monitoring and scaled robustness.

mod ast;
mod boolean;
mod expr;
mod parser;
mod robustness;
mod trace;

pub use ast::{Expr, Formula, Interval, Relation};
pub use boolean::eval_boolean;
pub use parser::parse_stl;
pub use robustness::{eval_robustness, RobustnessResult};
pub use trace::{SignalRange, SignalRanges, Trace};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown operator `{op}` at {line}:{col}")]
    UnknownOperator { line: usize, col: usize, op: String },
    #[error("malformed interval: {0}")]
    MalformedInterval(String),
    #[error("formula needs sample {needed} but the trace has {len}")]
    HorizonOverflow { needed: usize, len: usize },
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("no declared range for signal `{0}`")]
    MissingRange(String),
    #[error("invalid signal range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("positive robustness {value} with effective upper bound {hi}; check declared ranges")]
    DegenerateRange { value: f64, hi: f64 },
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
}

pub(crate) fn check_horizon(formula: &Formula, trace: &Trace, t: usize) -> Result<(), StlError> {
    let needed = t + formula.horizon(trace.dt());
    if needed >= trace.len() {
        return Err(StlError::HorizonOverflow {
            needed,
            len: trace.len(),
        });
    }
    Ok(())
}

/// Policy hook for predicates evaluated at equality.
///
/// Robustness is `0` when both sides of a predicate coincide, whatever the
/// relation. Such a trace sits on the boundary where an arbitrarily small
/// perturbation violates the requirement, so a scaled robustness of `0` is
/// treated as falsified for strict and non-strict relations alike. The
/// transform therefore leaves the formula unchanged; reported verdicts are
/// still confirmed with [`eval_boolean`].
pub fn strict_equality_fixup(formula: &Formula) -> Formula {
    formula.clone()
}

//! Quantitative semantics: traditional robustness together with the
//! trace-dependent effective range used to scale it into `[0, 1]`.
//!
//! Every node carries `(value, lo, hi)` per time index. The range of a
//! compound formula is inherited from the subformula and time point that
//! witnesses its value: the least index for temporal operators, the left
//! operand for exact ties between operands.

use serde::{Deserialize, Serialize};

use super::ast::{Formula, Relation};
use super::expr::{eval_expr, expr_range};
use super::{check_horizon, SignalRanges, StlError, Trace};

/// Robustness of a formula at one time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessResult {
    /// Traditional robustness.
    pub value: f64,
    /// Lower end of the effective range.
    pub effective_lo: f64,
    /// Upper end of the effective range.
    pub effective_hi: f64,
    /// Robustness scaled into `[0, 1]`; zero marks (near-)violation.
    pub scaled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Rob {
    value: f64,
    lo: f64,
    hi: f64,
}

impl Rob {
    const TOP: Rob = Rob {
        value: f64::INFINITY,
        lo: f64::INFINITY,
        hi: f64::INFINITY,
    };

    fn neg(self) -> Rob {
        Rob {
            value: -self.value,
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Conjunction: the smaller operand witnesses, the left one on ties.
    fn min(self, other: Rob) -> Rob {
        if other.value < self.value {
            other
        } else {
            self
        }
    }

    /// Disjunction as the negated conjunction of negations.
    fn max(self, other: Rob) -> Rob {
        self.neg().min(other.neg()).neg()
    }
}

/// Traditional and scaled robustness of `formula` over `trace` at index `t`.
///
/// Every signal the formula references needs a declared range in `ranges`.
pub fn eval_robustness(
    formula: &Formula,
    trace: &Trace,
    ranges: &SignalRanges,
    t: usize,
) -> Result<RobustnessResult, StlError> {
    check_horizon(formula, trace, t)?;
    let r = rob(formula, trace, ranges, t, t)?[0];
    Ok(RobustnessResult {
        value: r.value,
        effective_lo: r.lo,
        effective_hi: r.hi,
        scaled: scale(r)?,
    })
}

fn scale(r: Rob) -> Result<f64, StlError> {
    if r.value <= 0.0 {
        return Ok(0.0);
    }
    if r.value == f64::INFINITY {
        // Only tautological formulas such as `true` reach +inf.
        return Ok(1.0);
    }
    if !(r.hi > 0.0 && r.hi.is_finite()) {
        return Err(StlError::DegenerateRange {
            value: r.value,
            hi: r.hi,
        });
    }
    Ok((r.value / r.hi).clamp(0.0, 1.0))
}

fn rob(
    f: &Formula,
    trace: &Trace,
    ranges: &SignalRanges,
    lo: usize,
    hi: usize,
) -> Result<Vec<Rob>, StlError> {
    let dt = trace.dt();
    Ok(match f {
        Formula::True => vec![Rob::TOP; hi - lo + 1],
        Formula::Predicate { lhs, rel, rhs } => {
            let l = eval_expr(lhs, trace, lo, hi)?;
            let r = eval_expr(rhs, trace, lo, hi)?;
            let (llo, lhi) = expr_range(lhs, ranges)?;
            let (rlo, rhi) = expr_range(rhs, ranges)?;
            // X >= Y and X > Y measure X - Y; X <= Y and X < Y measure Y - X.
            let greater = matches!(rel, Relation::Ge | Relation::Gt);
            let (elo, ehi) = if greater { (llo - rhi, lhi - rlo) } else { (rlo - lhi, rhi - llo) };
            l.iter()
                .zip(&r)
                .map(|(&a, &b)| Rob {
                    value: if greater { a - b } else { b - a },
                    lo: elo,
                    hi: ehi,
                })
                .collect()
        }
        Formula::Not(a) => rob(a, trace, ranges, lo, hi)?.into_iter().map(Rob::neg).collect(),
        Formula::And(a, b) => {
            let rb = rob(b, trace, ranges, lo, hi)?;
            rob(a, trace, ranges, lo, hi)?
                .into_iter()
                .zip(rb)
                .map(|(x, y)| x.min(y))
                .collect()
        }
        Formula::Or(a, b) => {
            let rb = rob(b, trace, ranges, lo, hi)?;
            rob(a, trace, ranges, lo, hi)?
                .into_iter()
                .zip(rb)
                .map(|(x, y)| x.max(y))
                .collect()
        }
        Formula::Implies(a, b) => {
            let rb = rob(b, trace, ranges, lo, hi)?;
            rob(a, trace, ranges, lo, hi)?
                .into_iter()
                .zip(rb)
                .map(|(x, y)| x.neg().max(y))
                .collect()
        }
        Formula::Eventually(i, a) => {
            let (ia, ib) = i.offsets(dt);
            let inner = rob(a, trace, ranges, lo + ia, hi + ib)?;
            (lo..=hi)
                .map(|t| window_extreme(&inner[t - lo..=t - lo + (ib - ia)], true))
                .collect()
        }
        Formula::Always(i, a) => {
            let (ia, ib) = i.offsets(dt);
            let inner = rob(a, trace, ranges, lo + ia, hi + ib)?;
            (lo..=hi)
                .map(|t| window_extreme(&inner[t - lo..=t - lo + (ib - ia)], false))
                .collect()
        }
        Formula::Until(i, a, b) => {
            let (ia, ib) = i.offsets(dt);
            let left = if ib > 0 { rob(a, trace, ranges, lo, hi + ib - 1)? } else { Vec::new() };
            let right = rob(b, trace, ranges, lo + ia, hi + ib)?;
            (lo..=hi)
                .map(|t| until_at(t, ia, ib, |s| left[s - lo], |s| right[s - lo - ia]))
                .collect()
        }
    })
}

/// Max (or min) over a window, ranges taken from the least witnessing index.
fn window_extreme(window: &[Rob], maximum: bool) -> Rob {
    let mut best = window[0];
    for r in &window[1..] {
        let better = if maximum { r.value > best.value } else { r.value < best.value };
        if better {
            best = *r;
        }
    }
    best
}

/// `max_{t' in t+I} min(rho(psi, t'), min_{t'' in [t, t')} rho(phi, t''))`.
fn until_at(
    t: usize,
    ia: usize,
    ib: usize,
    left: impl Fn(usize) -> Rob,
    right: impl Fn(usize) -> Rob,
) -> Rob {
    // Running minimum of phi over [t, s); least index on ties.
    let mut prefix: Option<Rob> = None;
    let mut best: Option<Rob> = None;
    for s in t..=t + ib {
        if s >= t + ia {
            let psi = right(s);
            let candidate = match prefix {
                Some(p) if p.value < psi.value => Rob {
                    value: p.value,
                    lo: p.lo,
                    hi: p.hi,
                },
                _ => psi,
            };
            if best.is_none_or(|b| candidate.value > b.value) {
                best = Some(candidate);
            }
        }
        if s < t + ib {
            let phi = left(s);
            if prefix.is_none_or(|p| phi.value < p.value) {
                prefix = Some(phi);
            }
        }
    }
    best.expect("until window is nonempty")
}

//! Boolean satisfaction monitor.
//!
//! Written independently of the quantitative monitor so the two can be
//! cross-checked. Each node is evaluated once over the contiguous index range
//! its parent needs.

use super::ast::Formula;
use super::expr::eval_expr;
use super::{check_horizon, StlError, Trace};

/// Whether `trace` satisfies `formula` at sample index `t`.
pub fn eval_boolean(formula: &Formula, trace: &Trace, t: usize) -> Result<bool, StlError> {
    check_horizon(formula, trace, t)?;
    Ok(sat(formula, trace, t, t)?[0])
}

/// Satisfaction of `f` at every index in `lo..=hi`.
fn sat(f: &Formula, trace: &Trace, lo: usize, hi: usize) -> Result<Vec<bool>, StlError> {
    let dt = trace.dt();
    Ok(match f {
        Formula::True => vec![true; hi - lo + 1],
        Formula::Predicate { lhs, rel, rhs } => {
            let l = eval_expr(lhs, trace, lo, hi)?;
            let r = eval_expr(rhs, trace, lo, hi)?;
            l.iter().zip(&r).map(|(&a, &b)| rel.holds(a, b)).collect()
        }
        Formula::Not(a) => sat(a, trace, lo, hi)?.into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip_with(sat(a, trace, lo, hi)?, sat(b, trace, lo, hi)?, |x, y| x && y),
        Formula::Or(a, b) => zip_with(sat(a, trace, lo, hi)?, sat(b, trace, lo, hi)?, |x, y| x || y),
        Formula::Implies(a, b) => {
            zip_with(sat(a, trace, lo, hi)?, sat(b, trace, lo, hi)?, |x, y| !x || y)
        }
        Formula::Eventually(i, a) => {
            let (ia, ib) = i.offsets(dt);
            let inner = sat(a, trace, lo + ia, hi + ib)?;
            (lo..=hi)
                .map(|t| (t + ia..=t + ib).any(|s| inner[s - lo - ia]))
                .collect()
        }
        Formula::Always(i, a) => {
            let (ia, ib) = i.offsets(dt);
            let inner = sat(a, trace, lo + ia, hi + ib)?;
            (lo..=hi)
                .map(|t| (t + ia..=t + ib).all(|s| inner[s - lo - ia]))
                .collect()
        }
        Formula::Until(i, a, b) => {
            // phi must hold on [t, t') and psi at some t' in t + I.
            let (ia, ib) = i.offsets(dt);
            let left = if ib > 0 { sat(a, trace, lo, hi + ib - 1)? } else { Vec::new() };
            let right = sat(b, trace, lo + ia, hi + ib)?;
            (lo..=hi)
                .map(|t| {
                    let mut prefix_holds = true;
                    for s in t..=t + ib {
                        if s >= t + ia && prefix_holds && right[s - lo - ia] {
                            return true;
                        }
                        if s < t + ib {
                            prefix_holds &= left[s - lo];
                        }
                        if !prefix_holds {
                            return false;
                        }
                    }
                    false
                })
                .collect()
        }
    })
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

use super::ast::Expr;
use super::{SignalRanges, StlError, Trace};

/// Values of `expr` at every index in `lo..=hi`.
pub(crate) fn eval_expr(expr: &Expr, trace: &Trace, lo: usize, hi: usize) -> Result<Vec<f64>, StlError> {
    Ok(match expr {
        Expr::Signal(name) => trace
            .get(name)
            .ok_or_else(|| StlError::UnknownSignal(name.clone()))?[lo..=hi]
            .to_vec(),
        Expr::Const(c) => vec![*c; hi - lo + 1],
        Expr::Abs(e) => eval_expr(e, trace, lo, hi)?.into_iter().map(f64::abs).collect(),
        Expr::Scale(c, e) => eval_expr(e, trace, lo, hi)?.into_iter().map(|v| c * v).collect(),
        Expr::Add(a, b) => {
            let b = eval_expr(b, trace, lo, hi)?;
            eval_expr(a, trace, lo, hi)?.into_iter().zip(b).map(|(x, y)| x + y).collect()
        }
        Expr::Sub(a, b) => {
            let b = eval_expr(b, trace, lo, hi)?;
            eval_expr(a, trace, lo, hi)?.into_iter().zip(b).map(|(x, y)| x - y).collect()
        }
    })
}

/// Interval `[lo, hi]` guaranteed to contain `expr` when every signal stays
/// within its declared range.
pub(crate) fn expr_range(expr: &Expr, ranges: &SignalRanges) -> Result<(f64, f64), StlError> {
    Ok(match expr {
        Expr::Signal(name) => {
            let r = ranges
                .get(name)
                .ok_or_else(|| StlError::MissingRange(name.clone()))?;
            (r.lo(), r.hi())
        }
        Expr::Const(c) => (*c, *c),
        Expr::Abs(e) => {
            let (lo, hi) = expr_range(e, ranges)?;
            if lo >= 0.0 {
                (lo, hi)
            } else if hi <= 0.0 {
                (-hi, -lo)
            } else {
                (0.0, hi.max(-lo))
            }
        }
        Expr::Scale(c, e) => {
            let (lo, hi) = expr_range(e, ranges)?;
            if *c >= 0.0 {
                (c * lo, c * hi)
            } else {
                (c * hi, c * lo)
            }
        }
        Expr::Add(a, b) => {
            let (alo, ahi) = expr_range(a, ranges)?;
            let (blo, bhi) = expr_range(b, ranges)?;
            (alo + blo, ahi + bhi)
        }
        Expr::Sub(a, b) => {
            let (alo, ahi) = expr_range(a, ranges)?;
            let (blo, bhi) = expr_range(b, ranges)?;
            (alo - bhi, ahi - blo)
        }
    })
}

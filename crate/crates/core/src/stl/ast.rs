use std::fmt;

use super::StlError;

/// Arithmetic term appearing on either side of a predicate.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Signal(String),
    Const(f64),
    Abs(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Scale(f64, Box<Expr>),
}

impl Expr {
    pub fn signal(name: impl Into<String>) -> Self {
        Expr::Signal(name.into())
    }

    pub fn constant(value: f64) -> Self {
        Expr::Const(value)
    }

    /// Collects every referenced signal name (with repetitions) into `out`.
    pub fn collect_signals<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Signal(name) => out.push(name),
            Expr::Const(_) => {}
            Expr::Abs(e) | Expr::Scale(_, e) => e.collect_signals(out),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.collect_signals(out);
                b.collect_signals(out);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Lt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
        }
    }
}

/// Closed time interval `[lo, hi]` in time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, StlError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(StlError::MalformedInterval(format!(
                "bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo < 0.0 || hi < 0.0 {
            return Err(StlError::MalformedInterval(format!(
                "negative bound in [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(StlError::MalformedInterval(format!(
                "lower bound exceeds upper bound in [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Index offsets for a trace sampled with period `dt`, rounding each
    /// bound to the nearest sample.
    pub fn offsets(&self, dt: f64) -> (usize, usize) {
        let lo = (self.lo / dt).round() as usize;
        let hi = (self.hi / dt).round() as usize;
        (lo, hi)
    }
}

/// Abstract syntax of a signal temporal logic requirement.
///
/// `Or`, `Implies`, `Eventually` and `Always` are kept as nodes so formulas
/// print back the way they were written; the evaluators give them exactly
/// the semantics of their expansions into `Not`, `And`, `Until` and `True`.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    Predicate {
        lhs: Expr,
        rel: Relation,
        rhs: Expr,
    },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    Eventually(Interval, Box<Formula>),
    Always(Interval, Box<Formula>),
}

impl Formula {
    pub fn predicate(lhs: Expr, rel: Relation, rhs: Expr) -> Self {
        Formula::Predicate { lhs, rel, rhs }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn until(interval: Interval, a: Formula, b: Formula) -> Self {
        Formula::Until(interval, Box::new(a), Box::new(b))
    }

    pub fn eventually(interval: Interval, f: Formula) -> Self {
        Formula::Eventually(interval, Box::new(f))
    }

    pub fn always(interval: Interval, f: Formula) -> Self {
        Formula::Always(interval, Box::new(f))
    }

    /// Rewrites derived operators into the primitive fragment
    /// (`True`, predicates, `Not`, `And`, `Until`).
    pub fn expand(&self) -> Formula {
        match self {
            Formula::True | Formula::Predicate { .. } => self.clone(),
            Formula::Not(f) => Formula::not(f.expand()),
            Formula::And(a, b) => Formula::and(a.expand(), b.expand()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.expand()),
                Formula::not(b.expand()),
            )),
            Formula::Implies(a, b) => {
                Formula::or(Formula::not((**a).clone()), (**b).clone()).expand()
            }
            Formula::Until(i, a, b) => Formula::until(*i, a.expand(), b.expand()),
            Formula::Eventually(i, f) => Formula::until(*i, Formula::True, f.expand()),
            Formula::Always(i, f) => Formula::not(Formula::until(
                *i,
                Formula::True,
                Formula::not(f.expand()),
            )),
        }
    }

    /// Number of samples past the evaluation index that the formula reads,
    /// for a trace with sampling period `dt`.
    pub fn horizon(&self, dt: f64) -> usize {
        match self {
            Formula::True | Formula::Predicate { .. } => 0,
            Formula::Not(f) => f.horizon(dt),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.horizon(dt).max(b.horizon(dt))
            }
            Formula::Until(i, a, b) => i.offsets(dt).1 + a.horizon(dt).max(b.horizon(dt)),
            Formula::Eventually(i, f) | Formula::Always(i, f) => i.offsets(dt).1 + f.horizon(dt),
        }
    }

    /// Distinct signal names referenced by the formula, in first-use order.
    pub fn signals(&self) -> Vec<String> {
        let mut all = Vec::new();
        self.visit_exprs(&mut |e| e.collect_signals(&mut all));
        let mut out: Vec<String> = Vec::new();
        for name in all {
            if !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        }
        out
    }

    fn visit_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match self {
            Formula::True => {}
            Formula::Predicate { lhs, rhs, .. } => {
                f(lhs);
                f(rhs);
            }
            Formula::Not(a) | Formula::Eventually(_, a) | Formula::Always(_, a) => {
                a.visit_exprs(f)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(_, a, b) => {
                a.visit_exprs(f);
                b.visit_exprs(f);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::Predicate { .. } => 0,
            Formula::Not(a) | Formula::Eventually(_, a) | Formula::Always(_, a) => 1 + a.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Signal(name) => write!(f, "{name}"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Scale(c, e) => write!(f, "{c} * ({e})"),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::Predicate { lhs, rel, rhs } => write!(f, "{lhs} {} {rhs}", rel.symbol()),
            Formula::Not(a) => write!(f, "not ({a})"),
            Formula::And(a, b) => write!(f, "(({a}) and ({b}))"),
            Formula::Or(a, b) => write!(f, "(({a}) or ({b}))"),
            Formula::Implies(a, b) => write!(f, "(({a}) implies ({b}))"),
            Formula::Until(i, a, b) => write!(f, "(({a}) until{i} ({b}))"),
            Formula::Eventually(i, a) => write!(f, "eventually{i} ({a})"),
            Formula::Always(i, a) => write!(f, "always{i} ({a})"),
        }
    }
}

//! Falsification rates, Kaplan-Meier survival curves and the log-rank test
//! over executions-to-falsification.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurvivalError {
    #[error("no replicas")]
    Empty,
    #[error("event time {time} outside [1, {budget}]")]
    TimeOutOfRange { time: usize, budget: usize },
    #[error("censored observation at {time} but budget is {budget}")]
    EarlyCensoring { time: usize, budget: usize },
    #[error("budgets differ: {0} vs {1}")]
    BudgetMismatch(usize, usize),
}

/// Executions needed by one replica; `censored` means the budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub time: usize,
    pub censored: bool,
}

impl Observation {
    pub fn event(time: usize) -> Self {
        Observation { time, censored: false }
    }

    pub fn censored(budget: usize) -> Self {
        Observation {
            time: budget,
            censored: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalData {
    budget: usize,
    observations: Vec<Observation>,
}

impl SurvivalData {
    pub fn new(budget: usize, observations: Vec<Observation>) -> Result<Self, SurvivalError> {
        if observations.is_empty() {
            return Err(SurvivalError::Empty);
        }
        for o in &observations {
            if o.time == 0 || o.time > budget {
                return Err(SurvivalError::TimeOutOfRange { time: o.time, budget });
            }
            if o.censored && o.time != budget {
                return Err(SurvivalError::EarlyCensoring { time: o.time, budget });
            }
        }
        Ok(SurvivalData { budget, observations })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn falsified(&self) -> usize {
        self.observations.iter().filter(|o| !o.censored).count()
    }

    /// Events and at-risk counts at every time `1..=budget` (index 0 unused).
    fn counts(&self) -> (Vec<usize>, Vec<usize>) {
        let b = self.budget;
        let mut events = vec![0usize; b + 1];
        let mut leaving = vec![0usize; b + 2];
        for o in &self.observations {
            if !o.censored {
                events[o.time] += 1;
            }
            leaving[o.time] += 1;
        }
        let mut at_risk = vec![0usize; b + 1];
        let mut n = self.observations.len();
        for t in 1..=b {
            at_risk[t] = n;
            n -= leaving[t];
        }
        at_risk[0] = self.observations.len();
        (events, at_risk)
    }
}

/// Kaplan-Meier estimate on `t = 0..=budget` with pointwise 95% bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub survival: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
}

impl SurvivalCurve {
    pub fn budget(&self) -> usize {
        self.survival.len() - 1
    }

    /// CSV with columns `t,survival,lower,upper`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,survival,lower,upper")?;
        for t in 0..self.survival.len() {
            writeln!(out, "{t},{},{},{}", self.survival[t], self.lower[t], self.upper[t])?;
        }
        Ok(())
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Greenwood log(-log) interval for `s` with Greenwood sum `g`.
fn loglog_interval(s: f64, g: f64) -> (f64, f64) {
    if s <= 0.0 || s >= 1.0 || !g.is_finite() {
        return (s, s);
    }
    let ln_s = s.ln();
    let se = (g / (ln_s * ln_s)).sqrt();
    let lower = s.powf((Z95 * se).exp());
    let upper = s.powf((-Z95 * se).exp());
    (lower.clamp(0.0, 1.0), upper.clamp(0.0, 1.0))
}

/// Product-limit estimate `S(t) = prod_{i <= t} (1 - d_i / n_i)`.
///
/// The product is accumulated as an exact reduced fraction, so `S(B)` equals
/// the censored fraction exactly.
pub fn kaplan_meier(data: &SurvivalData) -> SurvivalCurve {
    let (events, at_risk) = data.counts();
    let b = data.budget;
    let (mut num, mut den) = (1u128, 1u128);
    let mut approx = 1.0f64;
    let mut exact = true;
    let mut greenwood = 0.0f64;
    let mut survival = vec![1.0; b + 1];
    let mut lower = vec![1.0; b + 1];
    let mut upper = vec![1.0; b + 1];
    for t in 1..=b {
        let (d, n) = (events[t], at_risk[t]);
        if d > 0 {
            approx *= 1.0 - d as f64 / n as f64;
            if exact {
                match (num.checked_mul((n - d) as u128), den.checked_mul(n as u128)) {
                    (Some(a), Some(c)) => {
                        let g = gcd(a, c).max(1);
                        (num, den) = (a / g, c / g);
                    }
                    _ => exact = false,
                }
            }
            greenwood += if n > d {
                d as f64 / (n as f64 * (n - d) as f64)
            } else {
                f64::INFINITY
            };
        }
        let s = if exact { num as f64 / den as f64 } else { approx };
        survival[t] = s;
        (lower[t], upper[t]) = loglog_interval(s, greenwood);
    }
    SurvivalCurve {
        survival,
        lower,
        upper,
        at_risk,
        events,
    }
}

/// Falsification rate with its 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `FR = falsified / N`, with the interval `1 - [upper, lower]` of the
/// survival estimate at the budget.
pub fn falsification_rate(data: &SurvivalData) -> RateEstimate {
    let curve = kaplan_meier(data);
    let b = data.budget;
    RateEstimate {
        rate: data.falsified() as f64 / data.len() as f64,
        lower: 1.0 - curve.upper[b],
        upper: 1.0 - curve.lower[b],
    }
}

/// Mean executions over falsified replicas; `None` when nothing falsified.
pub fn mean_executions(data: &SurvivalData) -> Option<f64> {
    let times: Vec<usize> = data.observations.iter().filter(|o| !o.censored).map(|o| o.time).collect();
    if times.is_empty() {
        None
    } else {
        Some(times.iter().sum::<usize>() as f64 / times.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRank {
    pub statistic: f64,
    pub p_value: f64,
    /// Observed minus expected events in the first group.
    pub observed_minus_expected: f64,
    pub variance: f64,
}

/// Upper tail of the chi-square distribution with one degree of freedom.
pub fn chi2_1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(1.0).expect("one degree of freedom").sf(x)
}

/// Two-group log-rank test.
pub fn logrank_test(a: &SurvivalData, b: &SurvivalData) -> Result<LogRank, SurvivalError> {
    if a.budget != b.budget {
        return Err(SurvivalError::BudgetMismatch(a.budget, b.budget));
    }
    let (ea, na) = a.counts();
    let (eb, nb) = b.counts();
    let mut o_minus_e = 0.0;
    let mut var = 0.0;
    for t in 1..=a.budget {
        let d = ea[t] + eb[t];
        if d == 0 {
            continue;
        }
        let n = na[t] + nb[t];
        let (d, n, da, n_a, n_b) = (d as f64, n as f64, ea[t] as f64, na[t] as f64, nb[t] as f64);
        o_minus_e += da - d * n_a / n;
        if n > 1.0 {
            var += d * (n_a / n) * (n_b / n) * (n - d) / (n - 1.0);
        }
    }
    let statistic = if var > 0.0 { o_minus_e * o_minus_e / var } else { 0.0 };
    Ok(LogRank {
        statistic,
        p_value: chi2_1_sf(statistic),
        observed_minus_expected: o_minus_e,
        variance: var,
    })
}

/// Rounds to three decimals, the precision used in reports.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(budget: usize, events: &[usize], censored: usize) -> SurvivalData {
        let mut obs: Vec<Observation> = events.iter().map(|&t| Observation::event(t)).collect();
        obs.extend((0..censored).map(|_| Observation::censored(budget)));
        SurvivalData::new(budget, obs).unwrap()
    }

    #[test]
    fn two_replica_curve() {
        let c = kaplan_meier(&data(5, &[3], 1));
        assert_eq!(c.survival, vec![1.0, 1.0, 1.0, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn all_fail_immediately() {
        let d = data(4, &[1, 1, 1], 0);
        assert_eq!(kaplan_meier(&d).survival[1], 0.0);
        assert_eq!(falsification_rate(&d), RateEstimate { rate: 1.0, lower: 1.0, upper: 1.0 });
    }

    #[test]
    fn no_failures() {
        let d = data(4, &[], 3);
        assert!(kaplan_meier(&d).survival.iter().all(|&s| s == 1.0));
        assert_eq!(falsification_rate(&d), RateEstimate { rate: 0.0, lower: 0.0, upper: 0.0 });
        assert_eq!(mean_executions(&d), None);
    }

    #[test]
    fn seven_of_ten() {
        let d = data(300, &[10, 20, 30, 40, 50, 60, 70], 3);
        let fr = falsification_rate(&d);
        assert_eq!(fr.rate, 0.7);
        assert_eq!((round2(fr.lower), round2(fr.upper)), (0.42, 0.93));
    }

    fn round2(x: f64) -> f64 {
        (x * 100.0).round() / 100.0
    }

    #[test]
    fn mean_over_events_only() {
        assert_eq!(mean_executions(&data(30, &[10, 20], 1)), Some(15.0));
        assert_eq!(mean_executions(&data(300, &[69], 0)), Some(69.0));
    }

    #[test]
    fn validation() {
        assert_eq!(SurvivalData::new(5, vec![]), Err(SurvivalError::Empty));
        assert!(SurvivalData::new(5, vec![Observation::event(0)]).is_err());
        assert!(SurvivalData::new(5, vec![Observation::event(6)]).is_err());
        assert!(SurvivalData::new(5, vec![Observation { time: 3, censored: true }]).is_err());
    }

    #[test]
    fn logrank_identical_and_separated() {
        let a = data(10, &[2, 5, 5, 9], 2);
        let r = logrank_test(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(round3(r.p_value), 1.0);

        let fast = data(10, &[1; 10], 0);
        let never = data(10, &[], 10);
        assert!(logrank_test(&fast, &never).unwrap().p_value < 0.01);

        let none = logrank_test(&never, &never).unwrap();
        assert_eq!((none.statistic, none.p_value), (0.0, 1.0));
        assert!(logrank_test(&a, &data(11, &[], 1)).is_err());
    }

    #[test]
    fn chi_square_tail() {
        assert!((chi2_1_sf(3.841458820694124) - 0.05).abs() < 1e-12);
        assert_eq!(chi2_1_sf(0.0), 1.0);
    }

    #[test]
    fn curve_csv() {
        let mut buf = Vec::new();
        kaplan_meier(&data(2, &[1], 1)).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,survival,lower,upper\n0,1,1,1\n1,0.5,"));
    }
}

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::survival::{logrank_test, SurvivalError};

use super::{ExperimentError, Report};

/// Log-rank comparison of two reports. A positive `effect` favors `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub budget: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub rate_a: f64,
    pub rate_b: f64,
    /// `rate_a - rate_b`.
    pub effect: f64,
}

fn label(r: &Report) -> String {
    format!("{} on {}", r.algorithm.name(), r.sut)
}

pub fn compare(a: &Report, b: &Report) -> Result<Comparison, ExperimentError> {
    if a.budget != b.budget {
        return Err(SurvivalError::BudgetMismatch(a.budget, b.budget).into());
    }
    let test = logrank_test(&a.survival_data()?, &b.survival_data()?)?;
    let (rate_a, rate_b) = (a.falsification_rate.rate, b.falsification_rate.rate);
    Ok(Comparison {
        a: label(a),
        b: label(b),
        budget: a.budget,
        statistic: test.statistic,
        p_value: test.p_value,
        rate_a,
        rate_b,
        effect: rate_a - rate_b,
    })
}

/// Both survival curves side by side, one row per execution count.
pub fn write_overlay_csv<W: Write>(a: &Report, b: &Report, out: W) -> Result<(), ExperimentError> {
    if a.budget != b.budget {
        return Err(SurvivalError::BudgetMismatch(a.budget, b.budget).into());
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "survival_a", "lower_a", "upper_a", "survival_b", "lower_b", "upper_b"])
        .map_err(|e| ExperimentError::Format(e.to_string()))?;
    let (ca, cb) = (&a.survival, &b.survival);
    for t in 0..=a.budget {
        let row = [
            t.to_string(),
            ca.survival[t].to_string(),
            ca.lower[t].to_string(),
            ca.upper[t].to_string(),
            cb.survival[t].to_string(),
            cb.lower[t].to_string(),
            cb.upper[t].to_string(),
        ];
        w.write_record(&row).map_err(|e| ExperimentError::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

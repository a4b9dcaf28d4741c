use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::StlError;

/// Declared value range `[lo, hi]` of one signal component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct SignalRange {
    lo: f64,
    hi: f64,
}

impl SignalRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self, StlError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(StlError::InvalidRange { lo, hi });
        }
        Ok(SignalRange { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

impl TryFrom<[f64; 2]> for SignalRange {
    type Error = StlError;

    fn try_from(v: [f64; 2]) -> Result<Self, Self::Error> {
        SignalRange::new(v[0], v[1])
    }
}

impl From<SignalRange> for [f64; 2] {
    fn from(r: SignalRange) -> Self {
        [r.lo, r.hi]
    }
}

/// Declared ranges keyed by signal name.
pub type SignalRanges = HashMap<String, SignalRange>;

/// Uniformly sampled, multi-component discrete-time signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    dt: f64,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Trace {
    pub fn new(dt: f64) -> Result<Self, StlError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StlError::InvalidTrace(format!("time step must be positive, got {dt}")));
        }
        Ok(Trace {
            dt,
            names: Vec::new(),
            columns: Vec::new(),
        })
    }

    /// Builds a trace from named columns of equal, nonzero length.
    pub fn from_columns(dt: f64, columns: Vec<(String, Vec<f64>)>) -> Result<Self, StlError> {
        let mut trace = Trace::new(dt)?;
        for (name, values) in columns {
            trace.push(name, values)?;
        }
        Ok(trace)
    }

    /// Appends (or replaces) a component.
    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), StlError> {
        let name = name.into();
        if values.is_empty() {
            return Err(StlError::InvalidTrace(format!("component `{name}` is empty")));
        }
        if let Some(first) = self.columns.first() {
            if first.len() != values.len() {
                return Err(StlError::InvalidTrace(format!(
                    "component `{name}` has {} samples, expected {}",
                    values.len(),
                    first.len()
                )));
            }
        }
        match self.names.iter().position(|n| *n == name) {
            Some(i) => self.columns[i] = values,
            None => {
                self.names.push(name);
                self.columns.push(values);
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn components(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
    }

    /// Copies every component of `other` into this trace.
    pub fn merge(&mut self, other: &Trace) -> Result<(), StlError> {
        if (other.dt - self.dt).abs() > 1e-12 * self.dt.max(other.dt) {
            return Err(StlError::InvalidTrace(format!(
                "cannot merge traces with time steps {} and {}",
                self.dt, other.dt
            )));
        }
        for (name, values) in other.components() {
            self.push(name, values.to_vec())?;
        }
        Ok(())
    }

    /// Applies `f` to every sample of every component.
    pub fn map_values(&self, mut f: impl FnMut(&str, usize, f64) -> f64) -> Trace {
        let columns = self
            .names
            .iter()
            .zip(&self.columns)
            .map(|(n, col)| col.iter().enumerate().map(|(i, &v)| f(n, i, v)).collect())
            .collect();
        Trace {
            dt: self.dt,
            names: self.names.clone(),
            columns,
        }
    }

    /// Per-component `[min, max]` observed in the trace, widened to a unit
    /// interval when the component is constant.
    pub fn observed_ranges(&self) -> SignalRanges {
        self.components()
            .map(|(name, col)| {
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
                (name.to_string(), SignalRange { lo, hi })
            })
            .collect()
    }

    /// Reads a CSV with header `time,<name>,...` and a uniform time column.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, StlError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| StlError::InvalidTrace(format!("csv header: {e}")))?
            .clone();
        if headers.get(0) != Some("time") {
            return Err(StlError::InvalidTrace("first column must be `time`".into()));
        }
        let width = headers.len();
        let mut time = Vec::new();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); width - 1];
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| StlError::InvalidTrace(format!("csv row {}: {e}", row + 2)))?;
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    StlError::InvalidTrace(format!("csv row {}: bad number `{field}`", row + 2))
                })?;
                if j == 0 {
                    time.push(v);
                } else {
                    cols[j - 1].push(v);
                }
            }
        }
        if time.is_empty() {
            return Err(StlError::InvalidTrace("trace has no samples".into()));
        }
        let dt = if time.len() > 1 { time[1] - time[0] } else { 1.0 };
        for w in time.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.abs().max(1e-12) {
                return Err(StlError::InvalidTrace("time column is not uniform".into()));
            }
        }
        let columns = headers.iter().skip(1).map(str::to_string).zip(cols).collect();
        Trace::from_columns(dt, columns)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), StlError> {
        let io = |e: csv::Error| StlError::InvalidTrace(format!("csv write: {e}"));
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["time".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for i in 0..self.len() {
            let mut row = vec![format!("{}", i as f64 * self.dt)];
            row.extend(self.columns.iter().map(|c| format!("{}", c[i])));
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| StlError::InvalidTrace(format!("csv write: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_components() {
        let mut t = Trace::new(0.1).unwrap();
        t.push("a", vec![1.0, 2.0]).unwrap();
        assert!(t.push("b", vec![1.0]).is_err());
        assert!(t.push("c", vec![]).is_err());
        assert!(Trace::new(0.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = Trace::from_columns(
            0.5,
            vec![("x".into(), vec![1.0, 2.5, -3.0]), ("y".into(), vec![0.0, 0.1, 0.2])],
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = Trace::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn csv_rejects_non_uniform_time() {
        let text = "time,x\n0,1\n1,2\n3,4\n";
        assert!(Trace::read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn range_validation() {
        assert!(SignalRange::new(1.0, 1.0).is_err());
        assert!(SignalRange::new(2.0, 1.0).is_err());
        let r: SignalRange = serde_json::from_str("[0, 120]").unwrap();
        assert_eq!(r.hi(), 120.0);
        assert!(serde_json::from_str::<SignalRange>("[5, 1]").is_err());
    }
}

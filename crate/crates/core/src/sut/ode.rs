use std::fmt;
use std::sync::Arc;

use crate::stl::Trace;

use super::SutError;

type Derivative = dyn Fn(&[f64], &[f64], f64, &mut [f64]) + Send + Sync;

/// Continuous-time system `x' = f(x, u, t)` integrated with fixed-step RK4.
#[derive(Clone)]
pub struct OdeSystem {
    pub state_names: Vec<String>,
    /// Input components read from the input trace, in the order passed to `f`.
    pub input_names: Vec<String>,
    pub initial: Vec<f64>,
    /// Integration step; rounded so that it divides the trace time step.
    pub step: f64,
    derivative: Arc<Derivative>,
}

impl fmt::Debug for OdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeSystem")
            .field("state_names", &self.state_names)
            .field("input_names", &self.input_names)
            .field("initial", &self.initial)
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

impl OdeSystem {
    /// `derivative(state, inputs, t, out)` writes `x'` into `out`.
    pub fn new(
        state_names: Vec<String>,
        input_names: Vec<String>,
        initial: Vec<f64>,
        step: f64,
        derivative: impl Fn(&[f64], &[f64], f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self, SutError> {
        if state_names.len() != initial.len() {
            return Err(SutError::InvalidParameters(format!(
                "{} state names for {} initial values",
                state_names.len(),
                initial.len()
            )));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(SutError::InvalidParameters(format!("integration step must be positive, got {step}")));
        }
        Ok(OdeSystem {
            state_names,
            input_names,
            initial,
            step,
            derivative: Arc::new(derivative),
        })
    }

    pub fn dimension(&self) -> usize {
        self.initial.len()
    }
}

/// Integrates `system` over `[0, duration]` with classical RK4, holding each
/// input sample constant until the next one. The result is sampled on the
/// input trace's grid.
pub fn integrate_rk4(system: &OdeSystem, input: &Trace, duration: f64) -> Result<Trace, SutError> {
    let dt = input.dt();
    let samples = (duration / dt + 1e-9).floor() as usize + 1;
    if input.len() < samples {
        return Err(SutError::InvalidParameters(format!(
            "input trace has {} samples, integration over {duration} needs {samples}",
            input.len()
        )));
    }
    let inputs: Vec<&[f64]> = system
        .input_names
        .iter()
        .map(|n| input.get(n).ok_or_else(|| SutError::MissingInput(n.clone())))
        .collect::<Result<_, _>>()?;
    let substeps = ((dt / system.step).round() as usize).max(1);
    let h = dt / substeps as f64;
    let dim = system.dimension();
    let f = &system.derivative;

    let mut x = system.initial.clone();
    let mut columns: Vec<Vec<f64>> = x.iter().map(|&v| {
        let mut c = Vec::with_capacity(samples);
        c.push(v);
        c
    }).collect();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    let mut u = vec![0.0; inputs.len()];

    for i in 0..samples - 1 {
        for (slot, col) in u.iter_mut().zip(&inputs) {
            *slot = col[i];
        }
        for s in 0..substeps {
            let t = i as f64 * dt + s as f64 * h;
            f(&x, &u, t, &mut k1);
            for j in 0..dim {
                tmp[j] = x[j] + 0.5 * h * k1[j];
            }
            f(&tmp, &u, t + 0.5 * h, &mut k2);
            for j in 0..dim {
                tmp[j] = x[j] + 0.5 * h * k2[j];
            }
            f(&tmp, &u, t + 0.5 * h, &mut k3);
            for j in 0..dim {
                tmp[j] = x[j] + h * k3[j];
            }
            f(&tmp, &u, t + h, &mut k4);
            for j in 0..dim {
                x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(SutError::NonFinite { time: t + h });
            }
        }
        for (col, &v) in columns.iter_mut().zip(&x) {
            col.push(v);
        }
    }
    Ok(Trace::from_columns(dt, system.state_names.iter().cloned().zip(columns).collect())?)
}

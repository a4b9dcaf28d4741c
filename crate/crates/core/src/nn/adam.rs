use super::{Network, Scalar};

/// Adam optimizer state for one network.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(net: &Network<T>, learning_rate: f64) -> Self {
        let shapes: Vec<usize> = net.params().iter().map(|p| p.value.len()).collect();
        AdamState {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first: shapes.iter().map(|&n| vec![T::zero(); n]).collect(),
            second: shapes.iter().map(|&n| vec![T::zero(); n]).collect(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one bias-corrected Adam update to every trainable parameter
    /// and clears all gradients.
    pub fn step(&mut self, net: &mut Network<T>) {
        self.step += 1;
        let t = self.step as i32;
        let b1 = T::from_f64_lossy(self.beta1);
        let b2 = T::from_f64_lossy(self.beta2);
        let one = T::one();
        let c1 = T::from_f64_lossy(1.0 - self.beta1.powi(t));
        let c2 = T::from_f64_lossy(1.0 - self.beta2.powi(t));
        let lr = T::from_f64_lossy(self.learning_rate);
        let eps = T::from_f64_lossy(self.epsilon);
        let step = lr / c1;
        let inv_c2 = one / c2;
        for ((p, m), v) in net.params_mut().into_iter().zip(&mut self.first).zip(&mut self.second) {
            if !p.frozen {
                for (((w, &g), mi), vi) in p.value.data_mut().iter_mut().zip(&p.grad).zip(m.iter_mut()).zip(v.iter_mut()) {
                    *mi = b1 * *mi + (one - b1) * g;
                    *vi = b2 * *vi + (one - b2) * g * g;
                    *w -= step * *mi / ((*vi * inv_c2).sqrt() + eps);
                }
            }
            p.zero_grad();
        }
    }
}

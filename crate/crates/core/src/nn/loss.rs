//! Logit-squashed squared error used for both networks.

use super::{NnError, Scalar, Tensor};

/// Weight of the symmetry-breaking term.
pub const LOSS_LAMBDA: f64 = 0.001;

const SQUASH_SCALE: f64 = 0.98;
const SQUASH_SHIFT: f64 = 0.01;
const CLAMP: f64 = 1e-7;

/// `F(x) = logit(0.98 x + 0.01)`.
pub fn squash_logit(x: f64) -> f64 {
    let z = SQUASH_SCALE * x + SQUASH_SHIFT;
    (z / (1.0 - z)).ln()
}

fn squash_logit_derivative(x: f64) -> f64 {
    let z = SQUASH_SCALE * x + SQUASH_SHIFT;
    SQUASH_SCALE / (z * (1.0 - z))
}

/// `L(y_hat, y) = (F(y_hat) - F(y))^2 + lambda (F(1/2 - (y_hat - y)/2) - F(1/2))^2`.
pub fn ogan_loss(predicted: f64, target: f64) -> f64 {
    let p = predicted.clamp(CLAMP, 1.0 - CLAMP);
    let a = squash_logit(p) - squash_logit(target);
    let b = squash_logit(0.5 - (p - target) / 2.0) - squash_logit(0.5);
    a * a + LOSS_LAMBDA * b * b
}

/// Derivative of [`ogan_loss`] with respect to the prediction.
pub fn ogan_loss_grad(predicted: f64, target: f64) -> f64 {
    let p = predicted.clamp(CLAMP, 1.0 - CLAMP);
    let a = squash_logit(p) - squash_logit(target);
    let q = 0.5 - (p - target) / 2.0;
    let b = squash_logit(q) - squash_logit(0.5);
    2.0 * a * squash_logit_derivative(p) - LOSS_LAMBDA * b * squash_logit_derivative(q)
}

/// Mean loss over a `(batch, 1)` prediction and its gradient.
pub fn batch_loss<T: Scalar>(predicted: &Tensor<T>, targets: &[f64]) -> Result<(f64, Tensor<T>), NnError> {
    if predicted.len() != targets.len() || predicted.is_empty() {
        return Err(NnError::Shape(format!(
            "{} predictions for {} targets",
            predicted.len(),
            targets.len()
        )));
    }
    let n = targets.len() as f64;
    let mut total = 0.0;
    let mut grad = Vec::with_capacity(targets.len());
    for (&p, &y) in predicted.data().iter().zip(targets) {
        let p = p.to_f64().unwrap_or(f64::NAN);
        total += ogan_loss(p, y);
        grad.push(T::from_f64_lossy(ogan_loss_grad(p, y) / n));
    }
    Ok((total / n, Tensor::new(predicted.shape().to_vec(), grad)?))
}

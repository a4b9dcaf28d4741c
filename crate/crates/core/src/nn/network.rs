use std::io::Write;

use super::{Layer, NnError, Param, Scalar, Tensor};

/// Sequential stack of layers with reverse-mode differentiation.
#[derive(Debug, Clone)]
pub struct Network<T> {
    layers: Vec<Layer<T>>,
    /// Inputs of each layer recorded by the last `forward`.
    tape: Option<Vec<Tensor<T>>>,
}

impl<T: Scalar> Network<T> {
    pub fn new(layers: Vec<Layer<T>>) -> Self {
        Network { layers, tape: None }
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    /// Forward pass that records intermediate values for [`Network::backward`].
    pub fn forward(&mut self, input: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        let mut tape = Vec::with_capacity(self.layers.len());
        let mut x = input.clone();
        for layer in &self.layers {
            let y = layer.apply(&x)?;
            tape.push(x);
            x = y;
        }
        self.tape = Some(tape);
        Ok(x)
    }

    /// Forward pass without recording; safe to share between threads.
    pub fn predict(&self, input: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        let mut x = input.clone();
        for layer in &self.layers {
            x = layer.apply(&x)?;
        }
        Ok(x)
    }

    /// Back-propagates `grad` (w.r.t. the last forward output), accumulating
    /// gradients into trainable parameters, and returns the gradient w.r.t.
    /// the network input. Frozen parameters pass gradients through untouched.
    pub fn backward(&mut self, grad: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        let tape = self.tape.take().ok_or(NnError::BackwardWithoutForward)?;
        let mut g = grad.clone();
        for (layer, x) in self.layers.iter_mut().zip(&tape).rev() {
            g = layer.backward(x, &g)?;
        }
        Ok(g)
    }

    pub fn params(&self) -> Vec<&Param<T>> {
        self.layers.iter().flat_map(Layer::params).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        self.layers.iter_mut().flat_map(Layer::params_mut).collect()
    }

    pub fn set_frozen(&mut self, frozen: bool) {
        for p in self.params_mut() {
            p.frozen = frozen;
        }
    }

    pub fn zero_grad(&mut self) {
        for p in self.params_mut() {
            p.zero_grad();
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.value.len()).sum()
    }

    /// Flat copy of every parameter value, in layer order.
    pub fn flat_parameters(&self) -> Vec<T> {
        self.params()
            .iter()
            .flat_map(|p| p.value.data().iter().copied())
            .collect()
    }

    /// Writes a textual checkpoint: one line per tensor with its layer index,
    /// name, shape and values.
    pub fn write_checkpoint<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (idx, layer) in self.layers.iter().enumerate() {
            for (name, p) in ["weight", "bias"].iter().zip(layer.params()) {
                let shape: Vec<String> = p.value.shape().iter().map(|d| d.to_string()).collect();
                let values: Vec<String> = p
                    .value
                    .data()
                    .iter()
                    .map(|v| format!("{}", v.to_f64().unwrap_or(f64::NAN)))
                    .collect();
                writeln!(out, "{idx} {name} {} {}", shape.join("x"), values.join(" "))?;
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Network<T> {
    pub(crate) fn layers_mut(&mut self) -> &mut [Layer<T>] {
        self.tape = None;
        &mut self.layers
    }
}

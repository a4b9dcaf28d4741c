use super::{NnError, Param, Scalar, Tensor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    LeakyRelu(f64),
    Tanh,
    Sigmoid,
}

impl Activation {
    /// Leaky ReLU with negative slope 0.01.
    pub const LEAKY: Activation = Activation::LeakyRelu(0.01);

    fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::LeakyRelu(slope) => {
                if x > T::zero() {
                    x
                } else {
                    x * T::from_f64_lossy(slope)
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => T::one() / (T::one() + (-x).exp()),
        }
    }

    fn derivative<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::LeakyRelu(slope) => {
                if x > T::zero() {
                    T::one()
                } else {
                    T::from_f64_lossy(slope)
                }
            }
            Activation::Tanh => {
                let y = x.tanh();
                T::one() - y * y
            }
            Activation::Sigmoid => {
                let y = self.apply(x);
                y * (T::one() - y)
            }
        }
    }
}

/// Fully connected layer computing `x W + b` on `(batch, in)` inputs.
#[derive(Debug, Clone)]
pub struct Dense<T> {
    pub(crate) weight: Param<T>,
    pub(crate) bias: Param<T>,
    inputs: usize,
    outputs: usize,
}

impl<T: Scalar> Dense<T> {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        Dense {
            weight: Param::zeros(vec![inputs, outputs]),
            bias: Param::zeros(vec![outputs]),
            inputs,
            outputs,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    fn apply(&self, x: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        if x.shape().len() != 2 || x.shape()[1] != self.inputs {
            return Err(NnError::Shape(format!(
                "dense layer expects (batch, {}), got {:?}",
                self.inputs,
                x.shape()
            )));
        }
        let batch = x.batch();
        let mut out = Vec::with_capacity(batch * self.outputs);
        for _ in 0..batch {
            out.extend_from_slice(self.bias.value.data());
        }
        let n = self.outputs as isize;
        T::gemm(
            batch,
            self.inputs,
            self.outputs,
            x.data(),
            (self.inputs as isize, 1),
            self.weight.value.data(),
            (n, 1),
            T::one(),
            &mut out,
        );
        Tensor::new(vec![batch, self.outputs], out)
    }

    fn backward(&mut self, x: &Tensor<T>, grad: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        let batch = x.batch();
        let (i, o) = (self.inputs, self.outputs);
        if grad.shape() != [batch, o] {
            return Err(NnError::Shape(format!("dense gradient {:?} != ({batch}, {o})", grad.shape())));
        }
        if !self.weight.frozen {
            // dW += x^T dy
            T::gemm(
                i,
                batch,
                o,
                x.data(),
                (1, i as isize),
                grad.data(),
                (o as isize, 1),
                T::one(),
                &mut self.weight.grad,
            );
        }
        if !self.bias.frozen {
            for row in grad.data().chunks_exact(o) {
                for (g, &d) in self.bias.grad.iter_mut().zip(row) {
                    *g += d;
                }
            }
        }
        // dx = dy W^T
        let mut dx = vec![T::zero(); batch * i];
        T::gemm(
            batch,
            o,
            i,
            grad.data(),
            (o as isize, 1),
            self.weight.value.data(),
            (1, o as isize),
            T::zero(),
            &mut dx,
        );
        Tensor::new(vec![batch, i], dx)
    }
}

/// One-dimensional convolution over `(batch, channels, length)` inputs.
///
/// A rank-2 `(batch, length)` input is accepted when there is a single
/// input channel.
#[derive(Debug, Clone)]
pub struct Conv1d<T> {
    pub(crate) weight: Param<T>,
    pub(crate) bias: Param<T>,
    in_channels: usize,
    out_channels: usize,
    kernel: usize,
    padding: usize,
}

/// Output positions `j` whose tap `q` lands inside the unpadded input.
fn valid_range(q: usize, p: usize, len: usize, out_len: usize) -> (usize, usize) {
    let lo = p.saturating_sub(q);
    let hi = (len + p).saturating_sub(q).min(out_len);
    (lo, hi.max(lo))
}

impl<T: Scalar> Conv1d<T> {
    /// Stride-1 convolution.
    pub fn new(in_channels: usize, out_channels: usize, kernel: usize, padding: usize) -> Self {
        Conv1d {
            weight: Param::zeros(vec![out_channels, in_channels, kernel]),
            bias: Param::zeros(vec![out_channels]),
            in_channels,
            out_channels,
            kernel,
            padding,
        }
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn kernel(&self) -> usize {
        self.kernel
    }

    pub fn output_len(&self, len: usize) -> usize {
        (len + 2 * self.padding + 1).saturating_sub(self.kernel)
    }

    fn dims(&self, x: &Tensor<T>) -> Result<(usize, usize), NnError> {
        match *x.shape() {
            [b, l] if self.in_channels == 1 => Ok((b, l)),
            [b, c, l] if c == self.in_channels => Ok((b, l)),
            _ => Err(NnError::Shape(format!(
                "conv layer expects (batch, {}, length), got {:?}",
                self.in_channels,
                x.shape()
            ))),
        }
    }

    /// Unfolds `x` into rows of `(batch * out_len, in_channels * kernel)`,
    /// zero where a tap falls in the padding.
    fn im2col(&self, x: &[T], batch: usize, len: usize, out_len: usize) -> Vec<T> {
        let (ci, k, p) = (self.in_channels, self.kernel, self.padding);
        let width = ci * k;
        let mut cols = vec![T::zero(); batch * out_len * width];
        for b in 0..batch {
            for c in 0..ci {
                let xc = &x[(b * ci + c) * len..(b * ci + c + 1) * len];
                for q in 0..k {
                    let (lo, hi) = valid_range(q, p, len, out_len);
                    for j in lo..hi {
                        cols[(b * out_len + j) * width + c * k + q] = xc[j + q - p];
                    }
                }
            }
        }
        cols
    }

    fn apply(&self, x: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        let (batch, len) = self.dims(x)?;
        let out_len = self.output_len(len);
        if out_len == 0 {
            return Err(NnError::Shape(format!("input length {len} too short for kernel")));
        }
        let (co, width) = (self.out_channels, self.in_channels * self.kernel);
        let cols = self.im2col(x.data(), batch, len, out_len);
        let rows = batch * out_len;
        // y'[(b, j), o] = cols . W^T, laid out (batch, out_len, co)
        let mut yt = vec![T::zero(); rows * co];
        T::gemm(
            rows,
            width,
            co,
            &cols,
            (width as isize, 1),
            self.weight.value.data(),
            (1, width as isize),
            T::zero(),
            &mut yt,
        );
        let bias = self.bias.value.data();
        let mut out = vec![T::zero(); batch * co * out_len];
        for b in 0..batch {
            for j in 0..out_len {
                let src = &yt[(b * out_len + j) * co..(b * out_len + j + 1) * co];
                for (o, &v) in src.iter().enumerate() {
                    out[(b * co + o) * out_len + j] = v + bias[o];
                }
            }
        }
        Tensor::new(vec![batch, co, out_len], out)
    }

    fn backward(&mut self, x: &Tensor<T>, grad: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        let (batch, len) = self.dims(x)?;
        let out_len = self.output_len(len);
        let (ci, co, k, p) = (self.in_channels, self.out_channels, self.kernel, self.padding);
        if grad.shape() != [batch, co, out_len] {
            return Err(NnError::Shape(format!("conv gradient has shape {:?}", grad.shape())));
        }
        let width = ci * k;
        let rows = batch * out_len;
        // dy' in (batch, out_len, co) layout
        let mut gt = vec![T::zero(); rows * co];
        for b in 0..batch {
            for o in 0..co {
                let g = &grad.data()[(b * co + o) * out_len..(b * co + o + 1) * out_len];
                for (j, &v) in g.iter().enumerate() {
                    gt[(b * out_len + j) * co + o] = v;
                }
            }
        }
        if !self.bias.frozen {
            for row in gt.chunks_exact(co) {
                for (g, &d) in self.bias.grad.iter_mut().zip(row) {
                    *g += d;
                }
            }
        }
        if !self.weight.frozen {
            // dW += dy'^T cols
            let cols = self.im2col(x.data(), batch, len, out_len);
            T::gemm(
                co,
                rows,
                width,
                &gt,
                (1, co as isize),
                &cols,
                (width as isize, 1),
                T::one(),
                &mut self.weight.grad,
            );
        }
        // dcols = dy' W, folded back onto the input
        let mut dcols = vec![T::zero(); rows * width];
        T::gemm(
            rows,
            co,
            width,
            &gt,
            (co as isize, 1),
            self.weight.value.data(),
            (width as isize, 1),
            T::zero(),
            &mut dcols,
        );
        let mut dx = vec![T::zero(); x.len()];
        for b in 0..batch {
            for c in 0..ci {
                let dxc = &mut dx[(b * ci + c) * len..(b * ci + c + 1) * len];
                for q in 0..k {
                    let (lo, hi) = valid_range(q, p, len, out_len);
                    for j in lo..hi {
                        dxc[j + q - p] += dcols[(b * out_len + j) * width + c * k + q];
                    }
                }
            }
        }
        Tensor::new(x.shape().to_vec(), dx)
    }
}

/// Max pooling along the last axis of `(batch, channels, length)` inputs.
#[derive(Debug, Clone, Copy)]
pub struct MaxPool1d {
    window: usize,
    stride: usize,
}

impl MaxPool1d {
    pub fn new(window: usize, stride: usize) -> Self {
        MaxPool1d { window, stride }
    }

    pub fn output_len(&self, len: usize) -> usize {
        if len < self.window {
            0
        } else {
            (len - self.window) / self.stride + 1
        }
    }

    fn dims(x_shape: &[usize]) -> Result<(usize, usize, usize), NnError> {
        match *x_shape {
            [b, c, l] => Ok((b, c, l)),
            _ => Err(NnError::Shape(format!("max-pool expects (batch, channels, length), got {x_shape:?}"))),
        }
    }

    /// Output values and, for each output, the flat index of its maximum
    /// (first one on ties).
    fn pool<T: Scalar>(&self, x: &Tensor<T>) -> Result<(Tensor<T>, Vec<usize>), NnError> {
        let (b, c, l) = Self::dims(x.shape())?;
        let out_len = self.output_len(l);
        if out_len == 0 {
            return Err(NnError::Shape(format!("length {l} shorter than pooling window")));
        }
        let mut out = Vec::with_capacity(b * c * out_len);
        let mut arg = Vec::with_capacity(b * c * out_len);
        for row in 0..b * c {
            let base = row * l;
            for j in 0..out_len {
                let start = base + j * self.stride;
                let mut best = start;
                for idx in start + 1..start + self.window {
                    if x.data()[idx] > x.data()[best] {
                        best = idx;
                    }
                }
                out.push(x.data()[best]);
                arg.push(best);
            }
        }
        Ok((Tensor::new(vec![b, c, out_len], out)?, arg))
    }
}

/// Layer of a sequential network.
#[derive(Debug, Clone)]
pub enum Layer<T> {
    Dense(Dense<T>),
    Conv1d(Conv1d<T>),
    MaxPool1d(MaxPool1d),
    Activation(Activation),
    Flatten,
}

impl<T: Scalar> Layer<T> {
    pub(crate) fn apply(&self, x: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        match self {
            Layer::Dense(d) => d.apply(x),
            Layer::Conv1d(c) => c.apply(x),
            Layer::MaxPool1d(p) => Ok(p.pool(x)?.0),
            Layer::Activation(Activation::LeakyRelu(slope)) => {
                let s = T::from_f64_lossy(*slope);
                let data = x.data().iter().map(|&v| if v > T::zero() { v } else { v * s }).collect();
                Tensor::new(x.shape().to_vec(), data)
            }
            Layer::Activation(a) => {
                let data = x.data().iter().map(|&v| a.apply(v)).collect();
                Tensor::new(x.shape().to_vec(), data)
            }
            Layer::Flatten => {
                let b = x.batch();
                let rest = if b == 0 { 0 } else { x.len() / b };
                x.clone().reshape(vec![b, rest])
            }
        }
    }

    /// Propagates `grad` (w.r.t. this layer's output) back to the layer's
    /// input `x`, accumulating parameter gradients on the way.
    pub(crate) fn backward(&mut self, x: &Tensor<T>, grad: &Tensor<T>) -> Result<Tensor<T>, NnError> {
        match self {
            Layer::Dense(d) => d.backward(x, grad),
            Layer::Conv1d(c) => c.backward(x, grad),
            Layer::MaxPool1d(p) => {
                let (_, arg) = p.pool(x)?;
                if grad.len() != arg.len() {
                    return Err(NnError::Shape("max-pool gradient size mismatch".into()));
                }
                let mut dx = vec![T::zero(); x.len()];
                for (&i, &g) in arg.iter().zip(grad.data()) {
                    dx[i] += g;
                }
                Tensor::new(x.shape().to_vec(), dx)
            }
            Layer::Activation(a) => {
                if grad.len() != x.len() {
                    return Err(NnError::Shape("activation gradient size mismatch".into()));
                }
                let data = match *a {
                    Activation::LeakyRelu(slope) => {
                        let s = T::from_f64_lossy(slope);
                        x.data()
                            .iter()
                            .zip(grad.data())
                            .map(|(&v, &g)| if v > T::zero() { g } else { g * s })
                            .collect()
                    }
                    _ => x.data().iter().zip(grad.data()).map(|(&v, &g)| g * a.derivative(v)).collect(),
                };
                Tensor::new(x.shape().to_vec(), data)
            }
            Layer::Flatten => grad.clone().reshape(x.shape().to_vec()),
        }
    }

    pub(crate) fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        match self {
            Layer::Dense(d) => vec![&mut d.weight, &mut d.bias],
            Layer::Conv1d(c) => vec![&mut c.weight, &mut c.bias],
            _ => Vec::new(),
        }
    }

    pub(crate) fn params(&self) -> Vec<&Param<T>> {
        match self {
            Layer::Dense(d) => vec![&d.weight, &d.bias],
            Layer::Conv1d(c) => vec![&c.weight, &c.bias],
            _ => Vec::new(),
        }
    }
}

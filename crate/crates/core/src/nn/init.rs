use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Activation, Layer, Network, Scalar};

/// Initialization scheme chosen for a parametric layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitScheme {
    /// Uniform on `+-sqrt(6 / (fan_in + fan_out))`.
    Glorot,
    /// Uniform on `+-sqrt(6 / ((1 + slope^2) fan_in))`.
    He { slope: f64 },
}

/// Re-initializes every weight from `seed`; biases are set to zero.
///
/// Layers feeding a leaky ReLU get He initialization, all others (tanh,
/// sigmoid or no activation) get Glorot.
pub fn init_weights<T: Scalar>(net: &mut Network<T>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    init_weights_with(net, &mut rng);
}

pub fn init_weights_with<T: Scalar, R: Rng>(net: &mut Network<T>, rng: &mut R) {
    let schemes = schemes(net);
    let mut scheme_iter = schemes.into_iter();
    for layer in net.layers_mut() {
        let (weight, bias, fan_in, fan_out) = match layer {
            Layer::Dense(d) => {
                let (i, o) = (d.inputs(), d.outputs());
                (&mut d.weight, &mut d.bias, i, o)
            }
            Layer::Conv1d(c) => {
                let (i, o) = (c.in_channels() * c.kernel(), c.out_channels() * c.kernel());
                (&mut c.weight, &mut c.bias, i, o)
            }
            _ => continue,
        };
        let scheme = scheme_iter.next().expect("one scheme per parametric layer");
        let bound = match scheme {
            InitScheme::Glorot => (6.0 / (fan_in + fan_out) as f64).sqrt(),
            InitScheme::He { slope } => (6.0 / ((1.0 + slope * slope) * fan_in as f64)).sqrt(),
        };
        for w in weight.value.data_mut() {
            *w = T::from_f64_lossy(rng.random_range(-bound..=bound));
        }
        bias.value.data_mut().iter_mut().for_each(|b| *b = T::zero());
        weight.zero_grad();
        bias.zero_grad();
    }
}

/// Scheme for each parametric layer, decided by the next activation before
/// another parametric layer.
pub fn schemes<T: Scalar>(net: &Network<T>) -> Vec<InitScheme> {
    let layers = net.layers();
    let mut out = Vec::new();
    for (i, layer) in layers.iter().enumerate() {
        if !matches!(layer, Layer::Dense(_) | Layer::Conv1d(_)) {
            continue;
        }
        let mut scheme = InitScheme::Glorot;
        for next in &layers[i + 1..] {
            match next {
                Layer::Activation(Activation::LeakyRelu(slope)) => {
                    scheme = InitScheme::He { slope: *slope };
                    break;
                }
                Layer::Activation(_) | Layer::Dense(_) | Layer::Conv1d(_) => break,
                _ => {}
            }
        }
        out.push(scheme);
    }
    out
}

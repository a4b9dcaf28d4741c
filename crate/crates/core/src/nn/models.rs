//! Network shapes used by the falsifier.

use super::{Activation, Conv1d, Dense, Layer, MaxPool1d, Network, Scalar};

/// Width of every hidden layer.
pub const HIDDEN: usize = 128;
/// Feature maps of each convolutional layer.
pub const FEATURE_MAPS: usize = 16;

/// Dense generator `[-1,1]^latent -> [-1,1]^output`: three leaky-ReLU hidden
/// layers and a tanh output.
pub fn generator<T: Scalar>(latent: usize, hidden: usize, output: usize) -> Network<T> {
    Network::new(vec![
        Layer::Dense(Dense::new(latent, hidden)),
        Layer::Activation(Activation::LEAKY),
        Layer::Dense(Dense::new(hidden, hidden)),
        Layer::Activation(Activation::LEAKY),
        Layer::Dense(Dense::new(hidden, hidden)),
        Layer::Activation(Activation::LEAKY),
        Layer::Dense(Dense::new(hidden, output)),
        Layer::Activation(Activation::Tanh),
    ])
}

/// Dense discriminator for vector inputs: the generator body with a sigmoid
/// scalar output.
pub fn dense_discriminator<T: Scalar>(input: usize, hidden: usize) -> Network<T> {
    Network::new(vec![
        Layer::Dense(Dense::new(input, hidden)),
        Layer::Activation(Activation::LEAKY),
        Layer::Dense(Dense::new(hidden, hidden)),
        Layer::Activation(Activation::LEAKY),
        Layer::Dense(Dense::new(hidden, hidden)),
        Layer::Activation(Activation::LEAKY),
        Layer::Dense(Dense::new(hidden, 1)),
        Layer::Activation(Activation::Sigmoid),
    ])
}

/// Convolutional discriminator for signal inputs, reading the test vector as
/// a one-channel sequence of length `input`.
///
/// Two blocks of conv(kernel 2, stride 1, padding 1) -> leaky ReLU ->
/// max-pool(2, 2), then flatten -> dense(hidden, no activation) -> dense(1)
/// -> sigmoid.
pub fn conv_discriminator<T: Scalar>(input: usize, feature_maps: usize, hidden: usize) -> Network<T> {
    let conv1 = Conv1d::new(1, feature_maps, 2, 1);
    let pool = MaxPool1d::new(2, 2);
    let len1 = pool.output_len(conv1.output_len(input));
    let conv2 = Conv1d::new(feature_maps, feature_maps, 2, 1);
    let len2 = pool.output_len(conv2.output_len(len1));
    let flat = feature_maps * len2.max(1);
    Network::new(vec![
        Layer::Conv1d(conv1),
        Layer::Activation(Activation::LEAKY),
        Layer::MaxPool1d(pool),
        Layer::Conv1d(conv2),
        Layer::Activation(Activation::LEAKY),
        Layer::MaxPool1d(pool),
        Layer::Flatten,
        Layer::Dense(Dense::new(flat, hidden)),
        Layer::Dense(Dense::new(hidden, 1)),
        Layer::Activation(Activation::Sigmoid),
    ])
}

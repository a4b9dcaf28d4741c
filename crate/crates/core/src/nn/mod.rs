//! Minimal reverse-mode network engine: dense and 1-D convolution layers,
//! activations, Adam and the logit-squashed loss.

mod adam;
mod init;
mod layers;
mod loss;
pub mod models;
mod network;
mod scalar;
mod tensor;

pub use adam::AdamState;
pub use init::{init_weights, init_weights_with, schemes, InitScheme};
pub use layers::{Activation, Conv1d, Dense, Layer, MaxPool1d};
pub use loss::{batch_loss, ogan_loss, ogan_loss_grad, squash_logit, LOSS_LAMBDA};
pub use network::Network;
pub use scalar::Scalar;
pub use tensor::{Param, Tensor};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("backward called without a preceding forward pass")]
    BackwardWithoutForward,
}

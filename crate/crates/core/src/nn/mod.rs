//! Dense ReLU MLP, Gaussian weight prior, output likelihoods, and exact
//! reverse-mode gradients of the log joint, plus the Adam optimizer used by
//! every gradient-trained method.

mod adam;
mod likelihood;
mod mlp;

pub use adam::AdamState;
pub use likelihood::{
    grad_log_joint, log_joint, log_likelihood, log_prior, pointwise_log_likelihood,
    LikelihoodModel, WeightPrior,
};
pub use mlp::{flatten, forward, forward_with_tape, unflatten, GradTape, LayerParams, MlpSpec, WeightVector};

//! Bayesian neural network inference methods and uncertainty-quality metrics.
//!
//! The crate bundles everything needed to compare approximate posterior
//! inference methods on small synthetic tasks:
//!
//! - [`nn`] — dense ReLU MLP, Gaussian weight prior, regression/classification
//!   likelihoods, exact reverse-mode gradients of the log joint, and Adam.
//! - [`samplers`] — HMC with acceptance-rate step-size adaptation, SGLD and
//!   SGHMC, plus chain diagnostics (autocorrelation, effective sample size).
//! - [`vi`] — mean-field Gaussian variational inference with reparameterized
//!   ELBO gradients, and a full-covariance Gaussian fit to posterior samples.
//! - [`baselines`] — MC dropout and deep ensembles trained by MAP.
//! - [`datasets`] — seeded generators for the four synthetic tasks.
//! - [`metrics`] — posterior predictive construction and the generalization and
//!   calibration metrics (marginal log-likelihood, RMSE, PICP, MPIW, accuracy,
//!   AUC).
//!
//! Every operation is deterministic given its inputs and seed; parallel callers
//! derive independent substreams with [`rng::substream`].

pub mod baselines;
pub mod datasets;
pub mod digest;
pub mod error;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod samplers;
pub mod vi;

pub use error::{Error, Result};

//! Sampling targets: the trait the samplers integrate against and its
//! adapter for the network posterior.

use crate::error::Result;
use crate::nn::{grad_log_joint, log_joint, LikelihoodModel, MlpSpec, WeightVector};
use ndarray::{Array1, Array2};

/// A differentiable unnormalized log density over a real vector.
pub trait Target: Sync {
    fn dim(&self) -> usize;

    /// Unnormalized log density at `position`.
    fn log_density(&self, position: &Array1<f64>) -> f64;

    /// Gradient of the log density at `position`.
    fn grad(&self, position: &Array1<f64>) -> Array1<f64>;
}

/// A target whose data term admits minibatched stochastic gradients.
pub trait MinibatchTarget: Target {
    /// Number of data points backing the likelihood term (0 for prior-only).
    fn num_data(&self) -> usize;

    /// Stochastic gradient: prior term plus the data term of the given batch
    /// scaled by `num_data / batch.len()`.
    fn grad_minibatch(&self, position: &Array1<f64>, batch: &[usize]) -> Array1<f64>;
}

/// The BNN log joint (prior times likelihood on a training split) as a
/// sampling target.
#[derive(Debug, Clone)]
pub struct BnnPosterior {
    model: LikelihoodModel,
    spec: MlpSpec,
    x: Array2<f64>,
    y: Array2<f64>,
}

impl BnnPosterior {
    pub fn new(model: LikelihoodModel, spec: MlpSpec, x: Array2<f64>, y: Array2<f64>) -> Result<Self> {
        model.validate_spec(&spec)?;
        if x.nrows() != y.nrows() {
            return Err(crate::error::Error::DimensionMismatch(format!(
                "{} inputs vs {} targets",
                x.nrows(),
                y.nrows()
            )));
        }
        Ok(Self { model, spec, x, y })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn model(&self) -> &LikelihoodModel {
        &self.model
    }
}

impl Target for BnnPosterior {
    fn dim(&self) -> usize {
        self.spec.param_count()
    }

    fn log_density(&self, position: &Array1<f64>) -> f64 {
        let w = WeightVector::from_raw(position.clone());
        log_joint(&self.model, &self.spec, &w, self.x.view(), self.y.view())
            .unwrap_or(f64::NEG_INFINITY)
    }

    fn grad(&self, position: &Array1<f64>) -> Array1<f64> {
        let w = WeightVector::from_raw(position.clone());
        grad_log_joint(&self.model, &self.spec, &w, self.x.view(), self.y.view(), None)
            .expect("shapes validated at construction")
    }
}

impl MinibatchTarget for BnnPosterior {
    fn num_data(&self) -> usize {
        self.x.nrows()
    }

    fn grad_minibatch(&self, position: &Array1<f64>, batch: &[usize]) -> Array1<f64> {
        let w = WeightVector::from_raw(position.clone());
        grad_log_joint(
            &self.model,
            &self.spec,
            &w,
            self.x.view(),
            self.y.view(),
            Some(batch),
        )
        .expect("shapes validated at construction")
    }
}

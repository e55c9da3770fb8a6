//! Closed-form targets used to validate the samplers: an independent
//! Gaussian and a conjugate Bayesian linear-regression posterior.

use super::target::{MinibatchTarget, Target};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2};

/// Gaussian with independent coordinates, given means and variances.
#[derive(Debug, Clone)]
pub struct DiagGaussian {
    pub mean: Array1<f64>,
    pub variance: Array1<f64>,
}

impl DiagGaussian {
    pub fn new(mean: Array1<f64>, variance: Array1<f64>) -> Self {
        assert_eq!(mean.len(), variance.len());
        assert!(variance.iter().all(|&v| v > 0.0));
        Self { mean, variance }
    }

    /// Standard normal in `dim` dimensions.
    pub fn standard(dim: usize) -> Self {
        Self::new(Array1::zeros(dim), Array1::ones(dim))
    }
}

impl Target for DiagGaussian {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn log_density(&self, position: &Array1<f64>) -> f64 {
        position
            .iter()
            .zip(self.mean.iter())
            .zip(self.variance.iter())
            .map(|((x, m), v)| -0.5 * (x - m) * (x - m) / v)
            .sum()
    }

    fn grad(&self, position: &Array1<f64>) -> Array1<f64> {
        let mut g = Array1::zeros(self.dim());
        for i in 0..self.dim() {
            g[i] = -(position[i] - self.mean[i]) / self.variance[i];
        }
        g
    }
}

impl MinibatchTarget for DiagGaussian {
    fn num_data(&self) -> usize {
        0
    }

    fn grad_minibatch(&self, position: &Array1<f64>, _batch: &[usize]) -> Array1<f64> {
        self.grad(position)
    }
}

/// Bayesian linear regression `y = X w + eps`, `eps ~ N(0, sigma^2)`, with a
/// standard-normal prior on `w`. The posterior is Gaussian with
/// `Sigma* = (I + X'X / sigma^2)^-1` and `mu* = Sigma* X'y / sigma^2`,
/// computed once at construction for use as a test oracle.
#[derive(Debug, Clone)]
pub struct GaussianLinearModel {
    x: Array2<f64>,
    y: Array1<f64>,
    noise_sigma: f64,
    posterior_mean: Array1<f64>,
    posterior_cov: Array2<f64>,
}

impl GaussianLinearModel {
    pub fn new(x: Array2<f64>, y: Array1<f64>, noise_sigma: f64) -> Self {
        assert_eq!(x.nrows(), y.len());
        assert!(noise_sigma > 0.0);
        let d = x.ncols();
        let inv_var = 1.0 / (noise_sigma * noise_sigma);
        let xtx = x.t().dot(&x);
        let mut precision = DMatrix::<f64>::identity(d, d);
        for i in 0..d {
            for j in 0..d {
                precision[(i, j)] += inv_var * xtx[[i, j]];
            }
        }
        let cov = precision.try_inverse().expect("posterior precision is SPD");
        let xty = x.t().dot(&y);
        let mut mean = Array1::zeros(d);
        for i in 0..d {
            for j in 0..d {
                mean[i] += cov[(i, j)] * inv_var * xty[j];
            }
        }
        let posterior_cov = Array2::from_shape_fn((d, d), |(i, j)| cov[(i, j)]);
        Self {
            x,
            y,
            noise_sigma,
            posterior_mean: mean,
            posterior_cov,
        }
    }

    pub fn posterior_mean(&self) -> &Array1<f64> {
        &self.posterior_mean
    }

    pub fn posterior_cov(&self) -> &Array2<f64> {
        &self.posterior_cov
    }
}

impl Target for GaussianLinearModel {
    fn dim(&self) -> usize {
        self.x.ncols()
    }

    fn log_density(&self, position: &Array1<f64>) -> f64 {
        let inv_var = 1.0 / (self.noise_sigma * self.noise_sigma);
        let prior: f64 = position.iter().map(|w| -0.5 * w * w).sum();
        let resid = &self.y - &self.x.dot(position);
        prior - 0.5 * inv_var * resid.iter().map(|r| r * r).sum::<f64>()
    }

    fn grad(&self, position: &Array1<f64>) -> Array1<f64> {
        let inv_var = 1.0 / (self.noise_sigma * self.noise_sigma);
        let resid = &self.y - &self.x.dot(position);
        let mut g = self.x.t().dot(&resid);
        g *= inv_var;
        g - position
    }
}

impl MinibatchTarget for GaussianLinearModel {
    fn num_data(&self) -> usize {
        self.x.nrows()
    }

    fn grad_minibatch(&self, position: &Array1<f64>, batch: &[usize]) -> Array1<f64> {
        let inv_var = 1.0 / (self.noise_sigma * self.noise_sigma);
        let scale = self.num_data() as f64 / batch.len() as f64;
        let mut g = position.mapv(|w| -w);
        for &i in batch {
            let xi = self.x.row(i);
            let r = self.y[i] - xi.dot(position);
            g.scaled_add(scale * inv_var * r, &xi);
        }
        g
    }
}

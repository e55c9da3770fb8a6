//! Adam optimizer (ascent form).

use ndarray::{Array1, ArrayView1};

/// Adam moment estimates plus hyperparameters.
///
/// The step moves parameters *along* the supplied gradient, so callers
/// maximizing an objective pass its gradient directly and callers minimizing
/// pass the negated gradient.
#[derive(Debug, Clone)]
pub struct AdamState {
    first_moment: Array1<f64>,
    second_moment: Array1<f64>,
    step_count: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Fresh state with standard betas (0.9, 0.999) and epsilon 1e-8.
    pub fn new(dim: usize, learning_rate: f64) -> Self {
        Self {
            first_moment: Array1::zeros(dim),
            second_moment: Array1::zeros(dim),
            step_count: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One bias-corrected update of `params` in the direction of `grad`.
    pub fn step(&mut self, params: &mut Array1<f64>, grad: ArrayView1<f64>) {
        assert_eq!(params.len(), self.first_moment.len(), "parameter length");
        assert_eq!(grad.len(), self.first_moment.len(), "gradient length");
        self.step_count += 1;
        let t = self.step_count as i32;
        let bias1 = 1.0 - self.beta1.powi(t);
        let bias2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grad[i];
            self.first_moment[i] = self.beta1 * self.first_moment[i] + (1.0 - self.beta1) * g;
            self.second_moment[i] = self.beta2 * self.second_moment[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.first_moment[i] / bias1;
            let v_hat = self.second_moment[i] / bias2;
            params[i] += self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

//! Weight prior, output likelihoods, and the log joint with exact gradients.

use crate::error::{Error, Result};
use crate::nn::mlp::{forward, forward_with_tape, MlpSpec, WeightVector};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

const LN_2PI: f64 = 1.8378770664093453;

/// Output likelihood attached to the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LikelihoodModel {
    /// `y = f(x;W) + eps`, `eps ~ N(0, noise_sigma^2)` independently per output.
    GaussianRegression { noise_sigma: f64 },
    /// Two-class labels in {0,1}; the single network output is the Bernoulli logit.
    BernoulliClassification,
}

impl LikelihoodModel {
    pub fn regression(noise_sigma: f64) -> Result<Self> {
        if !(noise_sigma > 0.0) || !noise_sigma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise sigma must be a positive finite real, got {noise_sigma}"
            )));
        }
        Ok(Self::GaussianRegression { noise_sigma })
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Self::BernoulliClassification)
    }

    /// Checks that the architecture can host this likelihood.
    pub fn validate_spec(&self, spec: &MlpSpec) -> Result<()> {
        if self.is_classification() && spec.output_dim() != 1 {
            return Err(Error::InvalidArgument(format!(
                "classification requires a single logit output, spec has {}",
                spec.output_dim()
            )));
        }
        Ok(())
    }
}

/// The fixed isotropic standard-normal prior over the flattened weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightPrior;

impl WeightPrior {
    pub fn log_density(&self, w: &WeightVector) -> f64 {
        log_prior(w)
    }

    /// Gradient of the log prior: `-w`.
    pub fn grad(&self, w: &WeightVector) -> Array1<f64> {
        w.values().mapv(|v| -v)
    }
}

/// Log density of the standard-normal prior: `-(P/2) ln 2pi - |w|^2 / 2`.
pub fn log_prior(w: &WeightVector) -> f64 {
    let sq_norm: f64 = w.values().iter().map(|v| v * v).sum();
    -0.5 * (w.len() as f64) * LN_2PI - 0.5 * sq_norm
}

/// Numerically stable `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Log density of one observation given the network output row.
///
/// For regression `f_row` holds the predicted means; for classification it
/// holds the logit, and `y_row` the 0/1 label. Stable for logits of any
/// magnitude (computed through softplus, never through the probability).
pub fn pointwise_log_likelihood(
    model: &LikelihoodModel,
    f_row: ArrayView1<f64>,
    y_row: ArrayView1<f64>,
) -> f64 {
    match model {
        LikelihoodModel::GaussianRegression { noise_sigma } => {
            let var = noise_sigma * noise_sigma;
            f_row
                .iter()
                .zip(y_row.iter())
                .map(|(f, y)| {
                    let r = y - f;
                    -0.5 * (LN_2PI + var.ln()) - r * r / (2.0 * var)
                })
                .sum()
        }
        LikelihoodModel::BernoulliClassification => {
            let z = f_row[0];
            if y_row[0] > 0.5 {
                -softplus(-z)
            } else {
                -softplus(z)
            }
        }
    }
}

fn check_data_shapes(
    model: &LikelihoodModel,
    spec: &MlpSpec,
    x: &ArrayView2<f64>,
    y: &ArrayView2<f64>,
) -> Result<()> {
    model.validate_spec(spec)?;
    if y.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} inputs vs {} targets",
            x.nrows(),
            y.nrows()
        )));
    }
    let want_cols = spec.output_dim();
    if y.ncols() != want_cols {
        return Err(Error::DimensionMismatch(format!(
            "targets have {} columns, expected {}",
            y.ncols(),
            want_cols
        )));
    }
    Ok(())
}

/// Sum of per-observation log densities under the model at weights `w`.
pub fn log_likelihood(
    model: &LikelihoodModel,
    spec: &MlpSpec,
    w: &WeightVector,
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
) -> Result<f64> {
    check_data_shapes(model, spec, &x, &y)?;
    if x.nrows() == 0 {
        return Ok(0.0);
    }
    let f = forward(spec, w, x)?;
    Ok(f
        .axis_iter(Axis(0))
        .zip(y.axis_iter(Axis(0)))
        .map(|(f_row, y_row)| pointwise_log_likelihood(model, f_row, y_row))
        .sum())
}

/// Unnormalized log posterior: `log p(W) + log p(D|W)` on the given split.
pub fn log_joint(
    model: &LikelihoodModel,
    spec: &MlpSpec,
    w: &WeightVector,
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
) -> Result<f64> {
    Ok(log_prior(w) + log_likelihood(model, spec, w, x, y)?)
}

/// Gradient of the per-output log density with respect to the network output.
fn output_grad(model: &LikelihoodModel, f: &Array2<f64>, y: &ArrayView2<f64>) -> Array2<f64> {
    match model {
        LikelihoodModel::GaussianRegression { noise_sigma } => {
            let inv_var = 1.0 / (noise_sigma * noise_sigma);
            let mut g = y - f;
            g *= inv_var;
            g
        }
        LikelihoodModel::BernoulliClassification => {
            let mut g = f.clone();
            g.zip_mut_with(y, |z, &lab| *z = lab - sigmoid(*z));
            g
        }
    }
}

/// Exact reverse-mode gradient of the log joint with respect to `w`.
///
/// With `minibatch = Some(indices)` the likelihood term is the stochastic
/// estimate `(N/|B|) * sum_{i in B} grad log p(y_i|x_i,W)`; with `None` the
/// full data is used. An empty dataset contributes only the prior gradient.
pub fn grad_log_joint(
    model: &LikelihoodModel,
    spec: &MlpSpec,
    w: &WeightVector,
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    minibatch: Option<&[usize]>,
) -> Result<Array1<f64>> {
    check_data_shapes(model, spec, &x, &y)?;
    let n = x.nrows();
    let mut grad = w.values().mapv(|v| -v);
    let (bx, by, scale) = match minibatch {
        None => {
            if n == 0 {
                return Ok(grad);
            }
            (x.to_owned(), y.to_owned(), 1.0)
        }
        Some(idx) => {
            if idx.is_empty() {
                return Err(Error::EmptyMinibatch);
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::BadMinibatchIndex { index: bad, len: n });
            }
            (
                x.select(Axis(0), idx),
                y.select(Axis(0), idx),
                n as f64 / idx.len() as f64,
            )
        }
    };
    let (f, tape) = forward_with_tape(spec, w, bx.view())?;
    let dy = output_grad(model, &f, &by.view());
    let lik_grad = tape.grad_weights(spec, w, dy.view())?;
    grad.scaled_add(scale, &lik_grad);
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_dataset<R: rand::Rng>(
        rng: &mut R,
        n: usize,
        d_in: usize,
        d_out: usize,
    ) -> (Array2<f64>, Array2<f64>) {
        let x = Array2::from_shape_fn((n, d_in), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array2::from_shape_fn((n, d_out), |_| rng.sample::<f64, _>(StandardNormal));
        (x, y)
    }

    #[test]
    fn log_prior_closed_form() {
        let spec = MlpSpec::new(vec![1, 1, 1]).unwrap();
        let w = WeightVector::zeros(&spec);
        assert_abs_diff_eq!(log_prior(&w), -2.0 * LN_2PI, epsilon = 1e-14);

        // P = 2, squared norm 2.
        let spec2 = MlpSpec::new(vec![1, 1]).unwrap();
        assert_eq!(spec2.param_count(), 2);
        let w2 = WeightVector::new(array![1.0, 1.0], &spec2).unwrap();
        assert_abs_diff_eq!(log_prior(&w2), -LN_2PI - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn log_prior_matches_product_of_univariate_densities() {
        // Independent-product oracle for the isotropic Gaussian.
        let spec = MlpSpec::new(vec![2, 4, 1]).unwrap();
        let mut rng = rng_from_seed(9);
        let w = WeightVector::standard_normal(&spec, &mut rng);
        let oracle: f64 = w
            .values()
            .iter()
            .map(|v| -0.5 * LN_2PI - 0.5 * v * v)
            .sum();
        assert_abs_diff_eq!(log_prior(&w), oracle, epsilon = 1e-12);
    }

    #[test]
    fn regression_loglik_exact_fit() {
        // Perfect fit at sigma = 0.5: density is the normalizer alone.
        let spec = MlpSpec::new(vec![1, 1, 1]).unwrap();
        let w = WeightVector::new(array![1.0, 0.0, 1.0, 0.0], &spec).unwrap();
        let model = LikelihoodModel::regression(0.5).unwrap();
        let x = array![[2.0]];
        let y = array![[2.0]];
        let got = log_likelihood(&model, &spec, &w, x.view(), y.view()).unwrap();
        assert_abs_diff_eq!(got, -0.5 * (2.0 * std::f64::consts::PI * 0.25).ln(), epsilon = 1e-14);
    }

    #[test]
    fn classification_loglik_at_zero_logit() {
        let spec = MlpSpec::new(vec![2, 3, 1]).unwrap();
        let w = WeightVector::zeros(&spec);
        let model = LikelihoodModel::BernoulliClassification;
        let x = array![[0.3, -0.4], [1.0, 2.0], [0.0, 0.1]];
        let y = array![[1.0], [0.0], [1.0]];
        let got = log_likelihood(&model, &spec, &w, x.view(), y.view()).unwrap();
        assert_abs_diff_eq!(got, 3.0 * 0.5_f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn loglik_matches_pointwise_oracle() {
        let spec = MlpSpec::new(vec![2, 5, 2]).unwrap();
        let mut rng = rng_from_seed(21);
        let w = WeightVector::standard_normal(&spec, &mut rng);
        let (x, y) = random_dataset(&mut rng, 7, 2, 2);
        let model = LikelihoodModel::regression(0.7).unwrap();
        let f = forward(&spec, &w, x.view()).unwrap();
        // Scalar-density oracle evaluated point by point.
        let mut oracle = 0.0;
        for n in 0..7 {
            for k in 0..2 {
                let var = 0.7 * 0.7;
                let r: f64 = y[[n, k]] - f[[n, k]];
                oracle += -0.5 * (2.0 * std::f64::consts::PI * var).ln() - r * r / (2.0 * var);
            }
        }
        let got = log_likelihood(&model, &spec, &w, x.view(), y.view()).unwrap();
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-10);
    }

    #[test]
    fn log_joint_empty_dataset_is_prior() {
        let spec = MlpSpec::new(vec![1, 3, 1]).unwrap();
        let mut rng = rng_from_seed(2);
        let w = WeightVector::standard_normal(&spec, &mut rng);
        let model = LikelihoodModel::regression(0.5).unwrap();
        let x = Array2::zeros((0, 1));
        let y = Array2::zeros((0, 1));
        let got = log_joint(&model, &spec, &w, x.view(), y.view()).unwrap();
        assert_abs_diff_eq!(got, log_prior(&w), epsilon = 0.0);
    }

    #[test]
    fn log_joint_additivity() {
        let spec = MlpSpec::new(vec![1, 4, 1]).unwrap();
        let mut rng = rng_from_seed(8);
        let w = WeightVector::standard_normal(&spec, &mut rng);
        let model = LikelihoodModel::regression(0.4).unwrap();
        let (x, y) = random_dataset(&mut rng, 6, 1, 1);
        let (x1, y1) = (x.slice(ndarray::s![..4, ..]), y.slice(ndarray::s![..4, ..]));
        let (x2, y2) = (x.slice(ndarray::s![4.., ..]), y.slice(ndarray::s![4.., ..]));
        let whole = log_joint(&model, &spec, &w, x.view(), y.view()).unwrap();
        let part = log_joint(&model, &spec, &w, x1, y1).unwrap()
            + log_likelihood(&model, &spec, &w, x2, y2).unwrap();
        assert_abs_diff_eq!(whole, part, epsilon = 1e-10);
    }

    #[test]
    fn grad_empty_dataset_is_negated_weights() {
        let spec = MlpSpec::new(vec![1, 3, 1]).unwrap();
        let mut rng = rng_from_seed(4);
        let w = WeightVector::standard_normal(&spec, &mut rng);
        let model = LikelihoodModel::regression(0.5).unwrap();
        let x = Array2::zeros((0, 1));
        let y = Array2::zeros((0, 1));
        let g = grad_log_joint(&model, &spec, &w, x.view(), y.view(), None).unwrap();
        for (gi, wi) in g.iter().zip(w.values().iter()) {
            assert_eq!(*gi, -wi);
        }
    }

    #[test]
    fn full_minibatch_equals_full_batch_exactly() {
        let spec = MlpSpec::new(vec![2, 4, 1]).unwrap();
        let mut rng = rng_from_seed(13);
        let w = WeightVector::standard_normal(&spec, &mut rng);
        let model = LikelihoodModel::regression(0.3).unwrap();
        let (x, y) = random_dataset(&mut rng, 9, 2, 1);
        let idx: Vec<usize> = (0..9).collect();
        let full = grad_log_joint(&model, &spec, &w, x.view(), y.view(), None).unwrap();
        let batched = grad_log_joint(&model, &spec, &w, x.view(), y.view(), Some(&idx)).unwrap();
        assert_eq!(full, batched);
    }

    #[test]
    fn empty_minibatch_rejected() {
        let spec = MlpSpec::new(vec![1, 2, 1]).unwrap();
        let w = WeightVector::zeros(&spec);
        let model = LikelihoodModel::regression(0.5).unwrap();
        let x = array![[1.0]];
        let y = array![[0.5]];
        let err = grad_log_joint(&model, &spec, &w, x.view(), y.view(), Some(&[])).unwrap_err();
        assert!(matches!(err, Error::EmptyMinibatch));
    }

    /// Central finite differences of the log joint; nudges any weight whose
    /// perturbation could cross a ReLU kink by resampling the triple.
    fn finite_diff_check(
        model: &LikelihoodModel,
        spec: &MlpSpec,
        w: &WeightVector,
        x: &Array2<f64>,
        y: &Array2<f64>,
        h: f64,
    ) -> f64 {
        let analytic = grad_log_joint(model, spec, w, x.view(), y.view(), None).unwrap();
        let mut max_rel = 0.0_f64;
        for i in 0..w.len() {
            let mut wp = w.values().clone();
            wp[i] += h;
            let fp = log_joint(model, spec, &WeightVector::from_raw(wp), x.view(), y.view()).unwrap();
            let mut wm = w.values().clone();
            wm[i] -= h;
            let fm = log_joint(model, spec, &WeightVector::from_raw(wm), x.view(), y.view()).unwrap();
            let numeric = (fp - fm) / (2.0 * h);
            let denom = analytic[i].abs().max(numeric.abs()).max(1.0);
            max_rel = max_rel.max((analytic[i] - numeric).abs() / denom);
        }
        max_rel
    }

    /// Smallest |preactivation| across all hidden units for the given inputs.
    fn min_preactivation_gap(spec: &MlpSpec, w: &WeightVector, x: &Array2<f64>) -> f64 {
        use crate::nn::mlp::unflatten;
        let layers = unflatten(w, spec).unwrap();
        let mut h = x.clone();
        let mut min_gap = f64::INFINITY;
        for (l, layer) in layers.iter().enumerate() {
            let mut z = h.dot(&layer.weights);
            z += &layer.biases;
            if l + 1 < spec.num_layers() {
                for v in z.iter() {
                    min_gap = min_gap.min(v.abs());
                }
                z.mapv_inplace(|v| v.max(0.0));
            }
            h = z;
        }
        min_gap
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(100);
        let mut checked = 0;
        while checked < 25 {
            let classification = rng.random::<bool>();
            let d_in = rng.random_range(1..=3);
            let hidden = rng.random_range(1..=6);
            let (spec, model) = if classification {
                (
                    MlpSpec::new(vec![d_in, hidden, 1]).unwrap(),
                    LikelihoodModel::BernoulliClassification,
                )
            } else {
                (
                    MlpSpec::new(vec![d_in, hidden, 1]).unwrap(),
                    LikelihoodModel::regression(0.5).unwrap(),
                )
            };
            let n = rng.random_range(1..=8);
            let w = WeightVector::standard_normal(&spec, &mut rng);
            let x = Array2::from_shape_fn((n, d_in), |_| rng.sample::<f64, _>(StandardNormal));
            let y = if classification {
                Array2::from_shape_fn((n, 1), |_| if rng.random::<bool>() { 1.0 } else { 0.0 })
            } else {
                Array2::from_shape_fn((n, 1), |_| rng.sample::<f64, _>(StandardNormal))
            };
            // Exclude near-kink configurations; the subgradient makes finite
            // differences invalid there.
            if min_preactivation_gap(&spec, &w, &x) < 1e-3 {
                continue;
            }
            let max_rel = finite_diff_check(&model, &spec, &w, &x, &y, 1e-5);
            assert!(max_rel < 1e-5, "relative error {max_rel} too large");
            checked += 1;
        }
    }
}

//! Network architecture, flat parameter vector, forward pass, and the
//! gradient tape for reverse-mode differentiation.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Architecture of a dense MLP: input width, hidden widths, output width.
///
/// Hidden layers use ReLU; the output layer is linear (the likelihood decides
/// how to interpret it, e.g. as a Bernoulli logit).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    layer_widths: Vec<usize>,
}

impl MlpSpec {
    pub fn new(layer_widths: Vec<usize>) -> Result<Self> {
        if layer_widths.len() < 2 {
            return Err(Error::InvalidArgument(
                "layer_widths needs at least input and output widths".into(),
            ));
        }
        if layer_widths.iter().any(|&w| w == 0) {
            return Err(Error::InvalidArgument("layer widths must be positive".into()));
        }
        Ok(Self { layer_widths })
    }

    pub fn layer_widths(&self) -> &[usize] {
        &self.layer_widths
    }

    pub fn input_dim(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    /// Number of weight layers (connections), one less than the width count.
    pub fn num_layers(&self) -> usize {
        self.layer_widths.len() - 1
    }

    /// Total parameter count: sum over layers of `in*out + out`.
    pub fn param_count(&self) -> usize {
        self.layer_widths
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

/// Flattened network parameters.
///
/// Layout: for each layer in order, the weight matrix in row-major `(in, out)`
/// order followed by the bias vector. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Array1<f64>,
}

impl WeightVector {
    /// Validates length against the spec and finiteness of every entry.
    pub fn new(values: Array1<f64>, spec: &MlpSpec) -> Result<Self> {
        if values.len() != spec.param_count() {
            return Err(Error::DimensionMismatch(format!(
                "weight vector has length {}, spec needs {}",
                values.len(),
                spec.param_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("weight vector entry".into()));
        }
        Ok(Self { values })
    }

    /// Wraps values without validation; for internal hot paths where the
    /// caller already guarantees length and finiteness.
    pub fn from_raw(values: Array1<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(spec: &MlpSpec) -> Self {
        Self {
            values: Array1::zeros(spec.param_count()),
        }
    }

    /// Draw from the standard-normal weight prior.
    pub fn standard_normal<R: Rng>(spec: &MlpSpec, rng: &mut R) -> Self {
        let values = Array1::from_iter((0..spec.param_count()).map(|_| rng.sample::<f64, _>(StandardNormal)));
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.values.view()
    }

    pub fn into_values(self) -> Array1<f64> {
        self.values
    }
}

/// Per-layer parameters: weights with shape `(in, out)` plus biases.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

/// Concatenates per-layer parameters into a flat weight vector.
pub fn flatten(layers: &[LayerParams], spec: &MlpSpec) -> Result<WeightVector> {
    let widths = spec.layer_widths();
    if layers.len() != spec.num_layers() {
        return Err(Error::DimensionMismatch(format!(
            "{} layers given, spec has {}",
            layers.len(),
            spec.num_layers()
        )));
    }
    let mut values = Vec::with_capacity(spec.param_count());
    for (l, layer) in layers.iter().enumerate() {
        let (n_in, n_out) = (widths[l], widths[l + 1]);
        if layer.weights.dim() != (n_in, n_out) || layer.biases.len() != n_out {
            return Err(Error::DimensionMismatch(format!(
                "layer {l}: expected weights ({n_in},{n_out}) and {n_out} biases"
            )));
        }
        values.extend(layer.weights.iter().copied());
        values.extend(layer.biases.iter().copied());
    }
    WeightVector::new(Array1::from_vec(values), spec)
}

/// Splits a flat weight vector back into per-layer parameters.
///
/// Exact inverse of [`flatten`].
pub fn unflatten(w: &WeightVector, spec: &MlpSpec) -> Result<Vec<LayerParams>> {
    if w.len() != spec.param_count() {
        return Err(Error::DimensionMismatch(format!(
            "weight vector has length {}, spec needs {}",
            w.len(),
            spec.param_count()
        )));
    }
    let slice = w.values.as_slice().expect("weight vector is contiguous");
    let mut layers = Vec::with_capacity(spec.num_layers());
    for (wv, bv) in layer_slices(spec, slice) {
        let n_out = bv.len();
        let n_in = wv.len() / n_out;
        layers.push(LayerParams {
            weights: Array2::from_shape_vec((n_in, n_out), wv.to_vec()).unwrap(),
            biases: Array1::from_vec(bv.to_vec()),
        });
    }
    Ok(layers)
}

/// Zero-copy iteration over (weight, bias) slices of a flat parameter buffer.
fn layer_slices<'a>(spec: &'a MlpSpec, values: &'a [f64]) -> impl Iterator<Item = (&'a [f64], &'a [f64])> {
    let widths = spec.layer_widths();
    let mut offset = 0usize;
    (0..spec.num_layers()).map(move |l| {
        let (n_in, n_out) = (widths[l], widths[l + 1]);
        let wv = &values[offset..offset + n_in * n_out];
        let bv = &values[offset + n_in * n_out..offset + n_in * n_out + n_out];
        offset += n_in * n_out + n_out;
        (wv, bv)
    })
}

fn check_forward_shapes(spec: &MlpSpec, w: &WeightVector, x: &ArrayView2<f64>) -> Result<()> {
    if x.ncols() != spec.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} columns, spec expects {}",
            x.ncols(),
            spec.input_dim()
        )));
    }
    if w.len() != spec.param_count() {
        return Err(Error::DimensionMismatch(format!(
            "weight vector has length {}, spec needs {}",
            w.len(),
            spec.param_count()
        )));
    }
    Ok(())
}

/// Evaluates the network on a batch of inputs (rows), producing one output
/// row per input.
pub fn forward(spec: &MlpSpec, w: &WeightVector, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    check_forward_shapes(spec, w, &x)?;
    let slice = w.values.as_slice().expect("weight vector is contiguous");
    let n_layers = spec.num_layers();
    let mut h = x.to_owned();
    for (l, (wv, bv)) in layer_slices(spec, slice).enumerate() {
        let n_out = bv.len();
        let n_in = wv.len() / n_out;
        let weights = ArrayView2::from_shape((n_in, n_out), wv).unwrap();
        let biases = ArrayView1::from(bv);
        let mut z = h.dot(&weights);
        z += &biases;
        if l + 1 < n_layers {
            z.mapv_inplace(|v| v.max(0.0));
        }
        h = z;
    }
    Ok(h)
}

/// Record of one forward pass, sufficient to backpropagate a scalar loss
/// gradient to the flattened weights.
///
/// Holds the input to each layer and the ReLU activation masks of the hidden
/// layers; weights are re-read from the caller at backward time.
#[derive(Debug, Clone)]
pub struct GradTape {
    layer_inputs: Vec<Array2<f64>>,
    relu_masks: Vec<Array2<f64>>,
}

/// Forward pass that also records the tape needed for [`GradTape::grad_weights`].
pub fn forward_with_tape(
    spec: &MlpSpec,
    w: &WeightVector,
    x: ArrayView2<f64>,
) -> Result<(Array2<f64>, GradTape)> {
    check_forward_shapes(spec, w, &x)?;
    let slice = w.values.as_slice().expect("weight vector is contiguous");
    let n_layers = spec.num_layers();
    let mut layer_inputs = Vec::with_capacity(n_layers);
    let mut relu_masks = Vec::with_capacity(n_layers.saturating_sub(1));
    let mut h = x.to_owned();
    for (l, (wv, bv)) in layer_slices(spec, slice).enumerate() {
        let n_out = bv.len();
        let n_in = wv.len() / n_out;
        let weights = ArrayView2::from_shape((n_in, n_out), wv).unwrap();
        let biases = ArrayView1::from(bv);
        let mut z = h.dot(&weights);
        z += &biases;
        layer_inputs.push(h);
        if l + 1 < n_layers {
            // Subgradient 0 at the kink: mask is strictly-positive preactivations.
            relu_masks.push(z.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 }));
            z.mapv_inplace(|v| v.max(0.0));
        }
        h = z;
    }
    Ok((h, GradTape { layer_inputs, relu_masks }))
}

impl GradTape {
    /// Backpropagates `output_grad` (the gradient of a scalar objective with
    /// respect to the network output, one row per input) to the flattened
    /// weights. The returned vector has length `spec.param_count()`.
    pub fn grad_weights(
        &self,
        spec: &MlpSpec,
        w: &WeightVector,
        output_grad: ArrayView2<f64>,
    ) -> Result<Array1<f64>> {
        let slice = w.values.as_slice().expect("weight vector is contiguous");
        let n_layers = spec.num_layers();
        if output_grad.nrows() != self.layer_inputs[0].nrows()
            || output_grad.ncols() != spec.output_dim()
        {
            return Err(Error::DimensionMismatch(format!(
                "output gradient shape {:?} does not match tape",
                output_grad.dim()
            )));
        }
        let layers: Vec<(&[f64], &[f64])> = layer_slices(spec, slice).collect();
        let mut grad = Array1::zeros(spec.param_count());
        let grad_slice = grad.as_slice_mut().unwrap();
        // Offsets of each layer in the flat layout.
        let mut offsets = Vec::with_capacity(n_layers);
        let mut acc = 0usize;
        for (wv, bv) in &layers {
            offsets.push(acc);
            acc += wv.len() + bv.len();
        }

        let mut g = output_grad.to_owned();
        for l in (0..n_layers).rev() {
            let (wv, bv) = layers[l];
            let n_out = bv.len();
            let n_in = wv.len() / n_out;
            let weights = ArrayView2::from_shape((n_in, n_out), wv).unwrap();
            let input = &self.layer_inputs[l];

            let dw = input.t().dot(&g);
            let db = g.sum_axis(Axis(0));
            let base = offsets[l];
            // dw may come back in column-major layout; iterate logically.
            for (dst, src) in grad_slice[base..base + n_in * n_out].iter_mut().zip(dw.iter()) {
                *dst = *src;
            }
            for (dst, src) in grad_slice[base + n_in * n_out..base + n_in * n_out + n_out]
                .iter_mut()
                .zip(db.iter())
            {
                *dst = *src;
            }

            if l > 0 {
                let mut upstream = g.dot(&weights.t());
                upstream *= &self.relu_masks[l - 1];
                g = upstream;
            }
        }
        Ok(grad)
    }
}

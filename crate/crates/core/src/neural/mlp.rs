//! Multilayer perceptron: affine layers with tanh hidden activations and an
//! identity scalar output.

use super::loss::{stacked_mse, LossValue};
use super::FlatParams;
use crate::error::{Error, Result};
use crate::rng::Rng64;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

/// One affine layer, `y = W x + b`, weights shaped (out, in).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

/// MLP parameters. Hidden layers apply tanh; the final layer is identity
/// with output width 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layers: Vec<Dense>,
}

impl MlpParams {
    /// Zero-initialized network with the given widths, `[input, hidden...,
    /// 1]`.
    pub fn zeros(widths: &[usize]) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::Argument("widths must name input and output".into()));
        }
        if *widths.last().unwrap() != 1 {
            return Err(Error::Argument("output width must be 1".into()));
        }
        let layers = widths
            .windows(2)
            .map(|w| Dense {
                weights: Array2::zeros((w[1], w[0])),
                bias: Array1::zeros(w[1]),
            })
            .collect();
        Ok(Self { layers })
    }

    /// Seeded init: every weight uniform in [-r, r] with r = 1 / sqrt(fan-in),
    /// biases zero.
    pub fn init(widths: &[usize], seed: u64) -> Result<Self> {
        let mut params = Self::zeros(widths)?;
        let mut rng = Rng64::new(seed);
        for layer in &mut params.layers {
            let r = 1.0 / (layer.weights.ncols() as f64).sqrt();
            for w in layer.weights.iter_mut() {
                *w = rng.uniform(-r, r);
            }
        }
        Ok(params)
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].weights.ncols()
    }
}

impl FlatParams for MlpParams {
    fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for layer in &self.layers {
            flat.extend(layer.weights.iter());
            flat.extend(layer.bias.iter());
        }
        flat
    }

    fn from_flat(&self, flat: &[f64]) -> Self {
        let mut out = self.clone();
        let mut cursor = 0;
        for layer in &mut out.layers {
            for w in layer.weights.iter_mut() {
                *w = flat[cursor];
                cursor += 1;
            }
            for b in layer.bias.iter_mut() {
                *b = flat[cursor];
                cursor += 1;
            }
        }
        assert_eq!(cursor, flat.len(), "flat vector length mismatch");
        out
    }

    fn layout(&self) -> Vec<(String, usize)> {
        let mut layout = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            layout.push((format!("layer{l}.weights"), layer.weights.len()));
            layout.push((format!("layer{l}.bias"), layer.bias.len()));
        }
        layout
    }
}

/// Forward pass for one input row.
pub fn mlp_forward(params: &MlpParams, x: &[f64]) -> Result<f64> {
    if x.len() != params.input_width() {
        return Err(Error::Shape(format!(
            "input has {} values, network expects {}",
            x.len(),
            params.input_width()
        )));
    }
    let mut activation = Array1::from(x.to_vec());
    let last = params.layers.len() - 1;
    for (l, layer) in params.layers.iter().enumerate() {
        let mut z = layer.weights.dot(&activation) + &layer.bias;
        if l != last {
            z.mapv_inplace(f64::tanh);
        }
        activation = z;
    }
    Ok(activation[0])
}

/// Forward pass over a batch of rows; returns one prediction per row.
pub fn mlp_forward_batch(params: &MlpParams, x: ArrayView2<f64>) -> Result<Array1<f64>> {
    if x.ncols() != params.input_width() {
        return Err(Error::Shape(format!(
            "batch has {} columns, network expects {}",
            x.ncols(),
            params.input_width()
        )));
    }
    let mut activation = x.to_owned();
    let last = params.layers.len() - 1;
    for (l, layer) in params.layers.iter().enumerate() {
        let mut z = activation.dot(&layer.weights.t()) + &layer.bias;
        if l != last {
            z.mapv_inplace(f64::tanh);
        }
        activation = z;
    }
    Ok(activation.index_axis(Axis(1), 0).to_owned())
}

/// Loss and exact gradients of the stacked MSE over a batch.
///
/// The gradient object reuses [`MlpParams`] as its shape-congruent
/// container.
pub fn mlp_backward(
    params: &MlpParams,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
) -> Result<(LossValue, MlpParams)> {
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows vs {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if x.ncols() != params.input_width() {
        return Err(Error::Shape(format!(
            "batch has {} columns, network expects {}",
            x.ncols(),
            params.input_width()
        )));
    }
    let batch = x.nrows() as f64;
    let last = params.layers.len() - 1;

    // Forward, keeping every activation.
    let mut activations: Vec<Array2<f64>> = vec![x.to_owned()];
    for (l, layer) in params.layers.iter().enumerate() {
        let mut z = activations[l].dot(&layer.weights.t()) + &layer.bias;
        if l != last {
            z.mapv_inplace(f64::tanh);
        }
        activations.push(z);
    }
    let predictions = activations.last().unwrap().index_axis(Axis(1), 0);
    let loss = stacked_mse(predictions, y)?;

    // d(loss)/d(output) = 2 (pred - y) / batch.
    let mut delta: Array2<f64> = activations.last().unwrap().clone();
    for (i, d) in delta.index_axis_mut(Axis(1), 0).iter_mut().enumerate() {
        *d = 2.0 * (*d - y[i]) / batch;
    }

    let mut grads = params.clone();
    for l in (0..params.layers.len()).rev() {
        grads.layers[l].weights = delta.t().dot(&activations[l]);
        grads.layers[l].bias = delta.sum_axis(Axis(0));
        if l > 0 {
            // Through the affine map, then through the tanh of layer l-1.
            let mut upstream = delta.dot(&params.layers[l].weights);
            upstream.zip_mut_with(&activations[l], |u, a| *u *= 1.0 - a * a);
            delta = upstream;
        }
    }
    Ok((loss, grads))
}

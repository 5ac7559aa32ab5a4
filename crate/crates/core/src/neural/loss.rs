//! Mean squared error over panels and stacked rows.

use crate::error::{Error, Result};
use crate::series::PaddedPanel;
use ndarray::{Array2, ArrayView1};

/// A loss value together with the number of samples it averaged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub mse: f64,
    pub sample_count: usize,
}

/// Panel MSE: mean over series of the per-series mean squared residual.
///
/// With `mask_padding` off every step counts and the per-series divisor is
/// the shared `T`, treating padded zeros as real "zero change" targets. With
/// it on, padded steps are excluded and each series averages over its own
/// usable rows; a series with no usable rows contributes zero.
pub fn panel_mse(
    predictions: &Array2<f64>,
    panel: &PaddedPanel,
    mask_padding: bool,
) -> Result<LossValue> {
    let n = panel.series_count();
    let t = panel.time_steps();
    if predictions.shape() != [n, t] {
        return Err(Error::Shape(format!(
            "predictions are {:?}, panel needs [{n}, {t}]",
            predictions.shape()
        )));
    }
    let data = panel.data();
    let mut total = 0.0;
    let mut counted = 0usize;
    for i in 0..n {
        let first = if mask_padding { panel.pad_rows(i) } else { 0 };
        let rows = t - first;
        if rows == 0 {
            continue;
        }
        let mut sum = 0.0;
        for r in first..t {
            let residual = data[[i, r, 2]] - predictions[[i, r]];
            sum += residual * residual;
        }
        total += sum / rows as f64;
        counted += rows;
    }
    Ok(LossValue {
        mse: total / n as f64,
        sample_count: counted,
    })
}

/// MSE over stacked rows: mean of squared residuals.
pub fn stacked_mse(predictions: ArrayView1<f64>, targets: ArrayView1<f64>) -> Result<LossValue> {
    if predictions.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} predictions vs {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Argument("stacked MSE over zero rows".into()));
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets.iter())
        .map(|(p, y)| (y - p) * (y - p))
        .sum();
    Ok(LossValue {
        mse: sum / predictions.len() as f64,
        sample_count: predictions.len(),
    })
}

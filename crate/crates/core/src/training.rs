//! Training objectives binding the model families to the optimizer, and
//! the high-level train entry points the CLI drives.

use crate::error::Result;
use crate::neural::{
    mlp_backward, mlp_forward_batch, recurrent_backward, recurrent_forward, FlatParams,
    LossValue, MlpParams, RecurrentParams,
};
use crate::optim::{train, BatchObjective, TrainConfig, TrainRun};
use crate::series::{LagDataset, PaddedPanel};
use ndarray::{Array1, Array2};

/// Stacked-MSE objective for an MLP over a lag dataset; samples are rows.
pub struct MlpObjective<'a> {
    pub template: MlpParams,
    pub data: &'a LagDataset,
}

impl BatchObjective for MlpObjective<'_> {
    fn sample_count(&self) -> usize {
        self.data.len()
    }

    fn loss_and_grad(&self, params: &[f64], batch: &[usize]) -> Result<(f64, Vec<f64>)> {
        let net = self.template.from_flat(params);
        let m = self.data.lag_count();
        let mut x = Array2::zeros((batch.len(), m));
        let mut y = Array1::zeros(batch.len());
        for (out, &row) in batch.iter().enumerate() {
            x.row_mut(out).assign(&self.data.inputs().row(row));
            y[out] = self.data.targets()[row];
        }
        let (loss, grads) = mlp_backward(&net, x.view(), y.view())?;
        Ok((loss.mse, grads.to_flat()))
    }

    fn tensor_name(&self, flat_index: usize) -> String {
        crate::neural::tensor_name_at(&self.template.layout(), flat_index)
    }
}

/// Panel-MSE objective for a recurrent network; samples are whole series.
pub struct RecurrentObjective<'a> {
    pub template: RecurrentParams,
    pub panel: &'a PaddedPanel,
    pub mask_padding: bool,
}

impl BatchObjective for RecurrentObjective<'_> {
    fn sample_count(&self) -> usize {
        self.panel.series_count()
    }

    fn loss_and_grad(&self, params: &[f64], batch: &[usize]) -> Result<(f64, Vec<f64>)> {
        let net = self.template.from_flat(params);
        let sub = self.panel.select(batch)?;
        let (loss, grads) = recurrent_backward(&net, &sub, self.mask_padding)?;
        Ok((loss.mse, grads.to_flat()))
    }

    fn tensor_name(&self, flat_index: usize) -> String {
        crate::neural::tensor_name_at(&self.template.layout(), flat_index)
    }
}

/// Stacked-MSE gradient as a flat vector, for a parameter vector expressed
/// in `template`'s shape.
pub fn mlp_backward_flat(
    template: &MlpParams,
    flat: &[f64],
    x: ndarray::ArrayView2<f64>,
    y: ndarray::ArrayView1<f64>,
) -> Result<Vec<f64>> {
    let net = template.from_flat(flat);
    let (_, grads) = mlp_backward(&net, x, y)?;
    Ok(grads.to_flat())
}

/// Panel-MSE gradient as a flat vector.
pub fn recurrent_backward_flat(
    template: &RecurrentParams,
    flat: &[f64],
    panel: &PaddedPanel,
    mask_padding: bool,
) -> Result<Vec<f64>> {
    let net = template.from_flat(flat);
    let (_, grads) = recurrent_backward(&net, panel, mask_padding)?;
    Ok(grads.to_flat())
}

/// Train an MLP from the given initial parameters; returns the trained
/// parameters and the loss trace.
pub fn train_mlp(
    init: &MlpParams,
    data: &LagDataset,
    config: &TrainConfig,
) -> Result<(MlpParams, TrainRun)> {
    let objective = MlpObjective {
        template: init.clone(),
        data,
    };
    let run = train(&objective, init.to_flat(), config)?;
    Ok((init.from_flat(&run.params), run))
}

/// Train a recurrent network on a panel.
pub fn train_recurrent(
    init: &RecurrentParams,
    panel: &PaddedPanel,
    mask_padding: bool,
    config: &TrainConfig,
) -> Result<(RecurrentParams, TrainRun)> {
    let objective = RecurrentObjective {
        template: init.clone(),
        panel,
        mask_padding,
    };
    let run = train(&objective, init.to_flat(), config)?;
    Ok((init.from_flat(&run.params), run))
}

/// Evaluate a trained MLP's stacked MSE on a dataset.
pub fn mlp_dataset_mse(params: &MlpParams, data: &LagDataset) -> Result<LossValue> {
    let preds = mlp_forward_batch(params, data.inputs().view())?;
    crate::neural::stacked_mse(preds.view(), data.targets().view())
}

/// Evaluate a trained recurrent network's panel MSE.
pub fn recurrent_panel_mse(
    params: &RecurrentParams,
    panel: &PaddedPanel,
    mask_padding: bool,
) -> Result<LossValue> {
    let preds = recurrent_forward(params, panel)?;
    crate::neural::panel_mse(&preds, panel, mask_padding)
}

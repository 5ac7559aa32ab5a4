//! Version-tagged JSON checkpoints.
//!
//! Layout: `{"format_version": 1, "family": "mlp" | "basic" | "lstm" |
//! "gru", "step": <schedule step counter>, "hidden_width": ..,
//! "tensors": [{"name": .., "shape": [..], "data": [..]}, ..]}`.
//! Tensors appear in flat-parameter order and `data` is row-major.

use super::{CellKind, Dense, Gate, MlpParams, RecurrentParams};
use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorDump {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub family: String,
    /// Optimizer schedule step the parameters were saved at.
    pub step: u64,
    pub tensors: Vec<TensorDump>,
}

impl Checkpoint {
    pub fn from_json(json: &str) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_str(json)?;
        if ckpt.format_version != FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "checkpoint format_version {} unsupported (expected {FORMAT_VERSION})",
                ckpt.format_version
            )));
        }
        for tensor in &ckpt.tensors {
            let expect: usize = tensor.shape.iter().product();
            if expect != tensor.data.len() {
                return Err(Error::Schema(format!(
                    "tensor {} claims shape {:?} but carries {} values",
                    tensor.name,
                    tensor.shape,
                    tensor.data.len()
                )));
            }
            if tensor.data.iter().any(|v| !v.is_finite()) {
                return Err(Error::Schema(format!(
                    "tensor {} has non-finite values",
                    tensor.name
                )));
            }
        }
        Ok(ckpt)
    }

    pub fn into_mlp(self) -> Result<MlpParams> {
        if self.family != "mlp" {
            return Err(Error::Schema(format!(
                "checkpoint family {} is not an MLP",
                self.family
            )));
        }
        if self.tensors.len() < 2 || self.tensors.len() % 2 != 0 {
            return Err(Error::Schema(
                "MLP checkpoints hold a weight/bias pair per layer".into(),
            ));
        }
        let mut layers = Vec::new();
        for pair in self.tensors.chunks(2) {
            let weights = as_matrix(&pair[0])?;
            let bias = as_vector(&pair[1])?;
            if bias.len() != weights.nrows() {
                return Err(Error::Schema(format!(
                    "bias {} does not match weights {}",
                    pair[1].name, pair[0].name
                )));
            }
            if let Some(prev) = layers.last() {
                let prev: &Dense = prev;
                if weights.ncols() != prev.weights.nrows() {
                    return Err(Error::Schema(format!(
                        "layer widths are inconsistent at {}",
                        pair[0].name
                    )));
                }
            }
            layers.push(Dense { weights, bias });
        }
        if layers.last().unwrap().weights.nrows() != 1 {
            return Err(Error::Schema("output width must be 1".into()));
        }
        Ok(MlpParams { layers })
    }

    pub fn into_recurrent(self) -> Result<RecurrentParams> {
        let kind = match self.family.as_str() {
            "basic" => CellKind::Basic,
            "lstm" => CellKind::Lstm,
            "gru" => CellKind::Gru,
            other => {
                return Err(Error::Schema(format!(
                    "checkpoint family {other} is not a recurrent cell"
                )))
            }
        };
        let per_layer = kind.gate_count() * 3;
        if self.tensors.len() < per_layer + 2
            || (self.tensors.len() - 2) % per_layer != 0
        {
            return Err(Error::Schema(format!(
                "{} tensors do not form {kind} layers plus a readout",
                self.tensors.len()
            )));
        }
        let layer_count = (self.tensors.len() - 2) / per_layer;
        let mut layers = Vec::new();
        let mut hidden = 0usize;
        for l in 0..layer_count {
            let mut gates = Vec::new();
            for g in 0..kind.gate_count() {
                let base = l * per_layer + g * 3;
                let w_x = as_matrix(&self.tensors[base])?;
                let w_h = as_matrix(&self.tensors[base + 1])?;
                let b = as_vector(&self.tensors[base + 2])?;
                if w_h.nrows() != w_h.ncols()
                    || w_x.nrows() != w_h.nrows()
                    || b.len() != w_h.nrows()
                {
                    return Err(Error::Schema(format!(
                        "gate shapes inconsistent at {}",
                        self.tensors[base].name
                    )));
                }
                if l == 0 && g == 0 {
                    hidden = w_h.nrows();
                } else if w_h.nrows() != hidden {
                    return Err(Error::Schema("hidden widths differ across gates".into()));
                }
                let expected_in = if l == 0 {
                    w_x.ncols() // layer 0 input width is free
                } else {
                    hidden
                };
                if w_x.ncols() != expected_in {
                    return Err(Error::Schema(format!(
                        "input width inconsistent at {}",
                        self.tensors[base].name
                    )));
                }
                gates.push(Gate { w_x, w_h, b });
            }
            layers.push(super::CellWeights { gates });
        }
        let readout_w = as_vector(&self.tensors[self.tensors.len() - 2])?;
        let readout_b_tensor = &self.tensors[self.tensors.len() - 1];
        if readout_w.len() != hidden || readout_b_tensor.data.len() != 1 {
            return Err(Error::Schema("readout shapes inconsistent".into()));
        }
        Ok(RecurrentParams {
            kind,
            layers,
            readout_w,
            readout_b: readout_b_tensor.data[0],
        })
    }
}

fn as_matrix(tensor: &TensorDump) -> Result<Array2<f64>> {
    if tensor.shape.len() != 2 {
        return Err(Error::Schema(format!(
            "tensor {} should be rank 2, got shape {:?}",
            tensor.name, tensor.shape
        )));
    }
    Array2::from_shape_vec((tensor.shape[0], tensor.shape[1]), tensor.data.clone())
        .map_err(|e| Error::Schema(format!("tensor {}: {e}", tensor.name)))
}

fn as_vector(tensor: &TensorDump) -> Result<Array1<f64>> {
    if tensor.shape.len() != 1 {
        return Err(Error::Schema(format!(
            "tensor {} should be rank 1, got shape {:?}",
            tensor.name, tensor.shape
        )));
    }
    Ok(Array1::from(tensor.data.clone()))
}

fn mlp_tensors(params: &MlpParams) -> Vec<TensorDump> {
    let mut tensors = Vec::new();
    for (l, layer) in params.layers.iter().enumerate() {
        tensors.push(TensorDump {
            name: format!("layer{l}.weights"),
            shape: vec![layer.weights.nrows(), layer.weights.ncols()],
            data: layer.weights.iter().copied().collect(),
        });
        tensors.push(TensorDump {
            name: format!("layer{l}.bias"),
            shape: vec![layer.bias.len()],
            data: layer.bias.to_vec(),
        });
    }
    tensors
}

fn recurrent_tensors(params: &RecurrentParams) -> Vec<TensorDump> {
    let mut tensors = Vec::new();
    let names = params.kind.gate_names();
    for (l, layer) in params.layers.iter().enumerate() {
        for (gate, name) in layer.gates.iter().zip(names) {
            tensors.push(TensorDump {
                name: format!("layer{l}.{name}.w_x"),
                shape: vec![gate.w_x.nrows(), gate.w_x.ncols()],
                data: gate.w_x.iter().copied().collect(),
            });
            tensors.push(TensorDump {
                name: format!("layer{l}.{name}.w_h"),
                shape: vec![gate.w_h.nrows(), gate.w_h.ncols()],
                data: gate.w_h.iter().copied().collect(),
            });
            tensors.push(TensorDump {
                name: format!("layer{l}.{name}.b"),
                shape: vec![gate.b.len()],
                data: gate.b.to_vec(),
            });
        }
    }
    tensors.push(TensorDump {
        name: "readout.w".into(),
        shape: vec![params.readout_w.len()],
        data: params.readout_w.to_vec(),
    });
    tensors.push(TensorDump {
        name: "readout.b".into(),
        shape: vec![1],
        data: vec![params.readout_b],
    });
    tensors
}

/// Checkpoint either model family.
pub enum CheckpointSource<'a> {
    Mlp(&'a MlpParams),
    Recurrent(&'a RecurrentParams),
}

impl<'a> From<&'a MlpParams> for CheckpointSource<'a> {
    fn from(p: &'a MlpParams) -> Self {
        CheckpointSource::Mlp(p)
    }
}

impl<'a> From<&'a RecurrentParams> for CheckpointSource<'a> {
    fn from(p: &'a RecurrentParams) -> Self {
        CheckpointSource::Recurrent(p)
    }
}

/// Write a checkpoint file.
pub fn save_checkpoint<'a>(
    params: impl Into<CheckpointSource<'a>>,
    step: u64,
    path: &Path,
) -> Result<()> {
    let (family, tensors) = match params.into() {
        CheckpointSource::Mlp(p) => ("mlp".to_string(), mlp_tensors(p)),
        CheckpointSource::Recurrent(p) => (p.kind.to_string(), recurrent_tensors(p)),
    };
    let ckpt = Checkpoint {
        format_version: FORMAT_VERSION,
        family,
        step,
        tensors,
    };
    std::fs::write(path, serde_json::to_string_pretty(&ckpt)?)?;
    Ok(())
}

/// Read a checkpoint file (family-agnostic; convert with
/// [`Checkpoint::into_mlp`] or [`Checkpoint::into_recurrent`]).
pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let json = std::fs::read_to_string(path)?;
    Checkpoint::from_json(&json)
}

//! From-scratch forward and backward passes for the four model families.
//!
//! Everything is f64 and deterministic: identical parameters and inputs give
//! bit-identical outputs within one build. Parameter objects are immutable
//! values; the optimizer exchanges them through their flat representation.

mod checkpoint;
mod loss;
mod mlp;
mod recurrent;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, TensorDump};
pub use loss::{panel_mse, stacked_mse, LossValue};
pub use mlp::{mlp_backward, mlp_forward, mlp_forward_batch, Dense, MlpParams};
pub use recurrent::{
    basic_step, gru_step, lstm_step, recurrent_backward, recurrent_forward, CellKind, CellWeights,
    Gate, RecurrentParams, PANEL_INPUT_WIDTH,
};

/// Parameter objects that can round-trip through a flat coordinate vector.
///
/// The flat order is the tensor order reported by [`FlatParams::layout`],
/// each tensor row-major. The optimizer, the finite-difference checks and
/// the bootstrap warm starts all speak this representation.
pub trait FlatParams: Sized {
    fn to_flat(&self) -> Vec<f64>;

    /// Rebuild from a flat vector, using `self` as the shape template.
    fn from_flat(&self, flat: &[f64]) -> Self;

    /// Tensor names with their flat lengths, in flat order.
    fn layout(&self) -> Vec<(String, usize)>;

    fn param_count(&self) -> usize {
        self.layout().iter().map(|(_, n)| n).sum()
    }
}

/// Name of the tensor owning a flat coordinate, for diagnostics.
pub fn tensor_name_at(layout: &[(String, usize)], flat_index: usize) -> String {
    let mut offset = 0;
    for (name, len) in layout {
        if flat_index < offset + len {
            return format!("{name}[{}]", flat_index - offset);
        }
        offset += len;
    }
    format!("<out of range {flat_index}>")
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

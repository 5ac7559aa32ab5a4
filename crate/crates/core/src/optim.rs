//! Adam, piecewise-constant learning rates, and the mini-batch training
//! loop shared by every model family.

use crate::error::{Error, Result};
use crate::rng::{derive_seed_indexed, Rng64};
use serde::{Deserialize, Serialize};

/// Piecewise-constant learning rate: `rates[i]` applies from `boundaries[i-1]`
/// (inclusive) to `boundaries[i]` (exclusive); a boundary step already uses
/// the next interval's rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub boundaries: Vec<u64>,
    pub rates: Vec<f64>,
}

impl LrSchedule {
    pub fn new(boundaries: Vec<u64>, rates: Vec<f64>) -> Result<Self> {
        if rates.len() != boundaries.len() + 1 {
            return Err(Error::Config(format!(
                "{} boundaries need {} rates, got {}",
                boundaries.len(),
                boundaries.len() + 1,
                rates.len()
            )));
        }
        if !boundaries.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("boundaries must be strictly increasing".into()));
        }
        if rates.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::Config("rates must be positive and finite".into()));
        }
        Ok(Self { boundaries, rates })
    }

    pub fn constant(rate: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![rate])
    }

    /// The published recurrent/MLP schedule: boundaries 300k / 600k / 1.2M,
    /// rates 1e-5, 5e-6, 1e-6, 1e-7, sized for a nominal 1.5M-step run.
    pub fn paper_forecast() -> Self {
        Self::new(
            vec![300_000, 600_000, 1_200_000],
            vec![1e-5, 5e-6, 1e-6, 1e-7],
        )
        .unwrap()
    }

    /// Nominal run length implied by [`LrSchedule::paper_forecast`].
    pub const PAPER_FORECAST_NOMINAL_STEPS: u64 = 1_500_000;

    /// The relevance-network schedule: boundaries 600k / 1.2M, rates
    /// 4e-3, 5e-4, 1e-4, sized for a nominal 1.8M-step run.
    pub fn paper_relevance() -> Self {
        Self::new(vec![600_000, 1_200_000], vec![4e-3, 5e-4, 1e-4]).unwrap()
    }

    /// Nominal run length implied by [`LrSchedule::paper_relevance`].
    pub const PAPER_RELEVANCE_NOMINAL_STEPS: u64 = 1_800_000;

    /// Rescale boundaries proportionally from a nominal run length to a new
    /// total step count, keeping the rates.
    pub fn scaled_to(&self, nominal_total: u64, new_total: u64) -> Result<Self> {
        if nominal_total == 0 || new_total == 0 {
            return Err(Error::Config("schedule totals must be positive".into()));
        }
        let mut boundaries: Vec<u64> = self
            .boundaries
            .iter()
            .map(|&b| ((b as u128 * new_total as u128) / nominal_total as u128) as u64)
            .collect();
        boundaries.dedup();
        if boundaries.first() == Some(&0) {
            boundaries.remove(0);
        }
        // Keep the trailing rates aligned with the surviving boundaries.
        let dropped = self.boundaries.len() - boundaries.len();
        let rates = self.rates[dropped..].to_vec();
        Self::new(boundaries, rates)
    }
}

/// Rate in effect at `step`: the interval index is the number of boundaries
/// at or below the step.
pub fn lr_at(schedule: &LrSchedule, step: u64) -> f64 {
    let i = schedule.boundaries.iter().filter(|&&b| b <= step).count();
    schedule.rates[i]
}

/// Adam accumulator state, shape-congruent with the flat parameter vector.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    /// Cited defaults: beta1 0.9, beta2 0.999, epsilon 1e-8.
    pub fn new(param_count: usize) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            first_moment: vec![0.0; param_count],
            second_moment: vec![0.0; param_count],
            step: 0,
        }
    }
}

/// One bias-corrected Adam update, in place.
///
/// On a non-finite gradient the error carries the flat coordinate index so
/// the caller can name the offending tensor.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    rate: f64,
) -> std::result::Result<(), usize> {
    assert_eq!(params.len(), grads.len(), "gradient shape mismatch");
    assert_eq!(params.len(), state.first_moment.len(), "state shape mismatch");
    if let Some(bad) = grads.iter().position(|g| !g.is_finite()) {
        return Err(bad);
    }
    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - state.beta1.powi(t);
    let bias2 = 1.0 - state.beta2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g;
        state.second_moment[i] =
            state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g;
        let m_hat = state.first_moment[i] / bias1;
        let v_hat = state.second_moment[i] / bias2;
        params[i] -= rate * m_hat / (v_hat.sqrt() + state.epsilon);
    }
    Ok(())
}

fn default_batch_size() -> usize {
    128
}

fn default_eval_every() -> u64 {
    10
}

/// Training-run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    pub total_steps: u64,
    pub schedule: LrSchedule,
    pub seed: u64,
    /// Steps between loss trace points.
    #[serde(default = "default_eval_every")]
    pub eval_every: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_steps < 1 {
            return Err(Error::Config("total_steps must be at least 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.eval_every < 1 {
            return Err(Error::Config("eval_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// A training problem over an indexed sample set: given flat parameters and
/// a batch of sample indices, produce the batch loss and its flat gradient.
pub trait BatchObjective {
    fn sample_count(&self) -> usize;

    fn loss_and_grad(&self, params: &[f64], batch: &[usize]) -> Result<(f64, Vec<f64>)>;

    /// Name of the tensor owning a flat coordinate, for diagnostics.
    fn tensor_name(&self, flat_index: usize) -> String;
}

/// Finished training run: final parameters and the loss trace.
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub params: Vec<f64>,
    /// (step, batch loss) recorded every `eval_every` steps and at the final
    /// step.
    pub trace: Vec<(u64, f64)>,
}

/// Mini-batch Adam over the objective.
///
/// Each epoch reshuffles the sample order with a seed derived from
/// `(config.seed, epoch index)`; the trailing short batch is used. Aborts
/// with the recent trace if the loss stops being finite.
pub fn train<O: BatchObjective>(
    objective: &O,
    init: Vec<f64>,
    config: &TrainConfig,
) -> Result<TrainRun> {
    config.validate()?;
    let n = objective.sample_count();
    if n == 0 {
        return Err(Error::Argument("training data is empty".into()));
    }
    let mut params = init;
    let mut state = AdamState::new(params.len());
    let mut trace = Vec::new();

    let mut order: Vec<usize> = (0..n).collect();
    let mut cursor = n; // force a shuffle on the first step
    let mut epoch = 0u64;

    for step in 1..=config.total_steps {
        if cursor >= n {
            let seed = derive_seed_indexed(config.seed, "epoch", epoch);
            Rng64::new(seed).shuffle(&mut order);
            cursor = 0;
            epoch += 1;
        }
        let end = (cursor + config.batch_size).min(n);
        let batch = &order[cursor..end];
        cursor = end;

        let (loss, grads) = objective.loss_and_grad(&params, batch)?;
        if !loss.is_finite() {
            return Err(Error::Training(format!(
                "loss became non-finite at step {step}; recent trace: {:?}",
                &trace[trace.len().saturating_sub(5)..]
            )));
        }
        let rate = lr_at(&config.schedule, step - 1);
        adam_step(&mut params, &grads, &mut state, rate).map_err(|bad| {
            Error::Training(format!(
                "non-finite gradient in {} at step {step}",
                objective.tensor_name(bad)
            ))
        })?;

        if step % config.eval_every == 0 || step == config.total_steps {
            trace.push((step, loss));
        }
    }
    Ok(TrainRun { params, trace })
}

//! Relevance testing for network inputs.
//!
//! A single-hidden-layer tanh network is fitted to one ticker's log-return
//! windows. The statistic m-hat is the sample mean of the squared partial
//! derivatives of the fitted output with respect to the inputs under test;
//! it is zero exactly when those inputs are irrelevant to the fitted
//! function. Its null distribution is approximated by a bootstrap: refit on
//! resamples (warm-started at the original weights) and record
//!
//!   B*_N = sum_n m(X_n, w*) - sum_n m(X_n, w) - sum_n grad_w m(X_n, w) . (w* - w)
//!
//! evaluated on the original rows; the linearization removes the first-order
//! term so B*_N is exactly zero when a refit returns the original weights.
//! The p-value is (k+1)/(v+1) with k the number of replications whose
//! B*_N / N strictly exceeds m-hat, and a Bonferroni bound aggregates the
//! per-model p-values into a joint verdict.

use crate::error::{Error, Result};
use crate::neural::FlatParams;
use crate::optim::{train, BatchObjective, LrSchedule, TrainConfig};
use crate::rng::{derive_seed, derive_seed_indexed, Rng64};
use crate::series::{
    apply_transform, build_lag_dataset, split_lag_dataset, LagDataset, PriceSeries, SplitSpec,
    Transform,
};
use chrono::NaiveDate;
use ndarray::ArrayView1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default hidden width of the test network.
pub const DEFAULT_HIDDEN_COUNT: usize = 16;

/// Lag counts of the three published return models (1, 3 and 5 lagged
/// log-price changes).
pub const PAPER_LAG_COUNTS: [usize; 3] = [1, 3, 5];

/// One-hidden-layer tanh network with linear output:
/// `f(x) = w00 + sum_j w0[j] * tanh(xt . w1[j])` where `xt = (1, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestNetwork {
    pub output_bias: f64,
    /// Output weights w_0j, one per hidden neuron.
    pub output_weights: Vec<f64>,
    /// Hidden weights w_1j, each `1 + input_count` long with the bias slot
    /// leading.
    pub hidden_weights: Vec<Vec<f64>>,
}

impl TestNetwork {
    pub fn zeros(hidden_count: usize, input_count: usize) -> Self {
        Self {
            output_bias: 0.0,
            output_weights: vec![0.0; hidden_count],
            hidden_weights: vec![vec![0.0; 1 + input_count]; hidden_count],
        }
    }

    /// Seeded init, uniform in [-r, r] with r = 1 / sqrt(fan-in).
    pub fn init(hidden_count: usize, input_count: usize, seed: u64) -> Self {
        let mut net = Self::zeros(hidden_count, input_count);
        let mut rng = Rng64::new(seed);
        let r_hidden = 1.0 / ((1 + input_count) as f64).sqrt();
        for w in &mut net.hidden_weights {
            for v in w.iter_mut() {
                *v = rng.uniform(-r_hidden, r_hidden);
            }
        }
        let r_out = 1.0 / (hidden_count as f64).sqrt();
        for v in &mut net.output_weights {
            *v = rng.uniform(-r_out, r_out);
        }
        net
    }

    pub fn hidden_count(&self) -> usize {
        self.output_weights.len()
    }

    pub fn input_count(&self) -> usize {
        self.hidden_weights[0].len() - 1
    }

    fn pre_activation(&self, j: usize, x: &[f64]) -> f64 {
        let w = &self.hidden_weights[j];
        let mut a = w[0];
        for (i, &xi) in x.iter().enumerate() {
            a += w[i + 1] * xi;
        }
        a
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut out = self.output_bias;
        for j in 0..self.hidden_count() {
            out += self.output_weights[j] * self.pre_activation(j, x).tanh();
        }
        out
    }
}

impl FlatParams for TestNetwork {
    fn to_flat(&self) -> Vec<f64> {
        let mut flat = vec![self.output_bias];
        flat.extend(&self.output_weights);
        for w in &self.hidden_weights {
            flat.extend(w);
        }
        flat
    }

    fn from_flat(&self, flat: &[f64]) -> Self {
        let mut out = self.clone();
        out.output_bias = flat[0];
        let j = self.hidden_count();
        out.output_weights.copy_from_slice(&flat[1..1 + j]);
        let width = 1 + self.input_count();
        for (k, w) in out.hidden_weights.iter_mut().enumerate() {
            let base = 1 + j + k * width;
            w.copy_from_slice(&flat[base..base + width]);
        }
        out
    }

    fn layout(&self) -> Vec<(String, usize)> {
        let mut layout = vec![
            ("output_bias".to_string(), 1),
            ("output_weights".to_string(), self.hidden_count()),
        ];
        for j in 0..self.hidden_count() {
            layout.push((format!("hidden{j}"), 1 + self.input_count()));
        }
        layout
    }
}

/// Closed-form input gradient `df/dx_i = sum_j w0[j] psi'(a_j) w1[j][i]`
/// with `psi' = 1 - tanh^2`.
pub fn input_gradient(net: &TestNetwork, x: &[f64], input: usize) -> f64 {
    let mut grad = 0.0;
    for j in 0..net.hidden_count() {
        let t = net.pre_activation(j, x).tanh();
        grad += net.output_weights[j] * (1.0 - t * t) * net.hidden_weights[j][input + 1];
    }
    grad
}

/// Per-observation statistic `m(x, w) = sum_{i in I0} f_i(x, w)^2`.
pub fn per_observation_m(net: &TestNetwork, x: &[f64], inputs_under_test: &[usize]) -> f64 {
    inputs_under_test
        .iter()
        .map(|&i| {
            let g = input_gradient(net, x, i);
            g * g
        })
        .sum()
}

/// The statistic m-hat: mean of the per-observation values over all rows.
pub fn m_statistic(net: &TestNetwork, inputs: &ndarray::Array2<f64>, inputs_under_test: &[usize]) -> f64 {
    let n = inputs.nrows();
    let total: f64 = (0..n)
        .map(|r| per_observation_m(net, inputs.row(r).as_slice().unwrap(), inputs_under_test))
        .sum();
    total / n as f64
}

/// Analytic gradient of `m(x, w)` with respect to the flat weight vector.
///
/// The output-bias component is identically zero: `f_i` never involves w00.
pub fn m_weight_gradient(net: &TestNetwork, x: &[f64], inputs_under_test: &[usize]) -> Vec<f64> {
    let j_count = net.hidden_count();
    let width = 1 + net.input_count();
    let mut grad = vec![0.0; 1 + j_count + j_count * width];

    // Cache activations and the f_i values.
    let tanh_a: Vec<f64> = (0..j_count)
        .map(|j| net.pre_activation(j, x).tanh())
        .collect();
    let psi1: Vec<f64> = tanh_a.iter().map(|t| 1.0 - t * t).collect();
    // psi'' = -2 tanh (1 - tanh^2)
    let psi2: Vec<f64> = tanh_a.iter().map(|t| -2.0 * t * (1.0 - t * t)).collect();

    for &i in inputs_under_test {
        let f_i: f64 = (0..j_count)
            .map(|j| net.output_weights[j] * psi1[j] * net.hidden_weights[j][i + 1])
            .sum();
        let scale = 2.0 * f_i;
        for j in 0..j_count {
            let w1_ji = net.hidden_weights[j][i + 1];
            // d f_i / d w0_j
            grad[1 + j] += scale * psi1[j] * w1_ji;
            // d f_i / d w1_j[l]: through the pre-activation for every slot,
            // plus the direct w1_j[i] term.
            let base = 1 + j_count + j * width;
            let common = net.output_weights[j] * psi2[j] * w1_ji;
            grad[base] += scale * common; // bias slot: xt[0] = 1
            for l in 0..net.input_count() {
                grad[base + 1 + l] += scale * common * x[l];
            }
            grad[base + 1 + i] += scale * net.output_weights[j] * psi1[j];
        }
    }
    grad
}

/// Training objective for the test network: MSE against scalar targets.
struct TestNetObjective<'a> {
    template: TestNetwork,
    inputs: &'a ndarray::Array2<f64>,
    targets: ArrayView1<'a, f64>,
}

impl BatchObjective for TestNetObjective<'_> {
    fn sample_count(&self) -> usize {
        self.inputs.nrows()
    }

    fn loss_and_grad(&self, params: &[f64], batch: &[usize]) -> Result<(f64, Vec<f64>)> {
        let net = self.template.from_flat(params);
        let j_count = net.hidden_count();
        let width = 1 + net.input_count();
        let mut grad = vec![0.0; params.len()];
        let mut loss = 0.0;
        let inv = 1.0 / batch.len() as f64;
        for &row in batch {
            let x = self.inputs.row(row);
            let x = x.as_slice().unwrap();
            let tanh_a: Vec<f64> = (0..j_count)
                .map(|j| net.pre_activation(j, x).tanh())
                .collect();
            let f: f64 = net.output_bias
                + (0..j_count)
                    .map(|j| net.output_weights[j] * tanh_a[j])
                    .sum::<f64>();
            let residual = f - self.targets[row];
            loss += residual * residual * inv;
            let d = 2.0 * residual * inv;
            grad[0] += d;
            for j in 0..j_count {
                grad[1 + j] += d * tanh_a[j];
                let gate = d * net.output_weights[j] * (1.0 - tanh_a[j] * tanh_a[j]);
                let base = 1 + j_count + j * width;
                grad[base] += gate;
                for l in 0..net.input_count() {
                    grad[base + 1 + l] += gate * x[l];
                }
            }
        }
        Ok((loss, grad))
    }

    fn tensor_name(&self, flat_index: usize) -> String {
        crate::neural::tensor_name_at(&self.template.layout(), flat_index)
    }
}

/// Training budgets for the fit and the warm-started bootstrap refits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelevanceConfig {
    pub hidden_count: usize,
    pub batch_size: usize,
    pub fit_steps: u64,
    pub fit_schedule: LrSchedule,
    /// Warm starts converge fast; refits default to a shorter run.
    pub refit_steps: u64,
    pub refit_schedule: LrSchedule,
}

impl RelevanceConfig {
    /// Desk-scale defaults: the published relevance schedule compressed
    /// proportionally onto short runs.
    pub fn desk_default() -> Self {
        let nominal = LrSchedule::PAPER_RELEVANCE_NOMINAL_STEPS;
        let fit_steps = 4_000;
        let refit_steps = 2_000;
        Self {
            hidden_count: DEFAULT_HIDDEN_COUNT,
            batch_size: 128,
            fit_steps,
            fit_schedule: LrSchedule::paper_relevance()
                .scaled_to(nominal, fit_steps)
                .unwrap(),
            refit_steps,
            refit_schedule: LrSchedule::paper_relevance()
                .scaled_to(nominal, refit_steps)
                .unwrap(),
        }
    }

    /// Budget used by the size/power Monte Carlo experiments: shorter refits
    /// (warm starts converge fast) so a 200-replication test stays cheap.
    pub fn monte_carlo_default() -> Self {
        let nominal = LrSchedule::PAPER_RELEVANCE_NOMINAL_STEPS;
        let fit_steps = 3_000;
        let refit_steps = 600;
        Self {
            hidden_count: DEFAULT_HIDDEN_COUNT,
            batch_size: 128,
            fit_steps,
            fit_schedule: LrSchedule::paper_relevance()
                .scaled_to(nominal, fit_steps)
                .unwrap(),
            refit_steps,
            refit_schedule: LrSchedule::paper_relevance()
                .scaled_to(nominal, refit_steps)
                .unwrap(),
        }
    }
}

/// Fit the test network on (already split) training rows. Deterministic
/// given `seed`.
pub fn fit_test_network(data: &LagDataset, config: &RelevanceConfig, seed: u64) -> Result<TestNetwork> {
    if data.is_empty() {
        return Err(Error::Argument("cannot fit on an empty dataset".into()));
    }
    let template = TestNetwork::zeros(config.hidden_count, data.lag_count());
    let init = TestNetwork::init(config.hidden_count, data.lag_count(), derive_seed(seed, "init"));
    let objective = TestNetObjective {
        template: template.clone(),
        inputs: data.inputs(),
        targets: data.targets().view(),
    };
    let run = train(
        &objective,
        init.to_flat(),
        &TrainConfig {
            batch_size: config.batch_size,
            total_steps: config.fit_steps,
            schedule: config.fit_schedule.clone(),
            seed: derive_seed(seed, "fit"),
            eval_every: 10,
        },
    )?;
    Ok(template.from_flat(&run.params))
}

/// Test specification: which inputs, how many replications, the seed and
/// the train cutoff (applied by the grid runner).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelevanceSpec {
    pub inputs_under_test: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub cutoff: NaiveDate,
    #[serde(default)]
    pub standardize: bool,
}

impl RelevanceSpec {
    pub fn all_inputs(m: usize, replications: usize, seed: u64) -> Self {
        Self {
            inputs_under_test: (0..m).collect(),
            replications,
            seed,
            cutoff: NaiveDate::from_ymd_opt(2012, 1, 1).unwrap(),
            standardize: false,
        }
    }
}

/// Outcome of one bootstrap relevance test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub m_hat: f64,
    /// v values of B*_N / N.
    pub boot_stats: Vec<f64>,
    /// Replications strictly exceeding m-hat.
    pub exceed_count: usize,
    /// (k + 1) / (v + 1).
    pub p_value: f64,
}

/// The bootstrap statistic for one refit, evaluated on the original rows.
pub fn bootstrap_statistic(
    original: &LagDataset,
    fitted: &TestNetwork,
    refitted: &TestNetwork,
    inputs_under_test: &[usize],
    sum_m_fitted: f64,
    sum_grad_fitted: &[f64],
) -> f64 {
    let n = original.len();
    let mut sum_m_star = 0.0;
    for r in 0..n {
        let x = original.inputs().row(r);
        sum_m_star += per_observation_m(refitted, x.as_slice().unwrap(), inputs_under_test);
    }
    let w = fitted.to_flat();
    let w_star = refitted.to_flat();
    let linear: f64 = sum_grad_fitted
        .iter()
        .zip(w_star.iter().zip(w.iter()))
        .map(|(g, (ws, wo))| g * (ws - wo))
        .sum();
    sum_m_star - sum_m_fitted - linear
}

/// Run the full bootstrap test on (already split) training rows.
///
/// Step 1 fits the network; each replication resamples rows with
/// replacement, refits warm-started at the fitted weights with a derived
/// seed, and records B*_N / N. Replications run in parallel; results are
/// collected by index so the outcome does not depend on scheduling.
pub fn bootstrap_test(
    data: &LagDataset,
    spec: &RelevanceSpec,
    config: &RelevanceConfig,
) -> Result<(TestNetwork, BootstrapResult)> {
    if spec.inputs_under_test.is_empty() {
        return Err(Error::Argument("inputs_under_test is empty".into()));
    }
    if let Some(&bad) = spec
        .inputs_under_test
        .iter()
        .find(|&&i| i >= data.lag_count())
    {
        return Err(Error::Argument(format!(
            "input index {bad} out of range for m = {}",
            data.lag_count()
        )));
    }
    if spec.replications == 0 {
        return Err(Error::Argument("need at least one replication".into()));
    }
    let standardized;
    let data = if spec.standardize {
        standardized = standardize_inputs(data);
        &standardized
    } else {
        data
    };
    let n = data.len();

    let fitted = fit_test_network(data, config, spec.seed)?;
    let m_hat = m_statistic(&fitted, data.inputs(), &spec.inputs_under_test);

    // Precompute the fitted-side sums once; they are shared by every
    // replication.
    let mut sum_m_fitted = 0.0;
    let mut sum_grad_fitted = vec![0.0; fitted.param_count()];
    for r in 0..n {
        let x = data.inputs().row(r);
        let x = x.as_slice().unwrap();
        sum_m_fitted += per_observation_m(&fitted, x, &spec.inputs_under_test);
        for (acc, g) in sum_grad_fitted
            .iter_mut()
            .zip(m_weight_gradient(&fitted, x, &spec.inputs_under_test))
        {
            *acc += g;
        }
    }

    let fitted_flat = fitted.to_flat();
    let boot_stats: Vec<f64> = (0..spec.replications)
        .into_par_iter()
        .map(|b| -> Result<f64> {
            let mut rng = Rng64::new(derive_seed_indexed(spec.seed, "resample", b as u64));
            let rows: Vec<usize> = (0..n).map(|_| rng.index(n)).collect();
            let resampled = data.take_rows(&rows);
            let objective = TestNetObjective {
                template: fitted.clone(),
                inputs: resampled.inputs(),
                targets: resampled.targets().view(),
            };
            let run = train(
                &objective,
                fitted_flat.clone(),
                &TrainConfig {
                    batch_size: config.batch_size,
                    total_steps: config.refit_steps,
                    schedule: config.refit_schedule.clone(),
                    seed: derive_seed_indexed(spec.seed, "refit", b as u64),
                    eval_every: 10,
                },
            )
            .map_err(|e| Error::Bootstrap {
                index: b,
                message: e.to_string(),
            })?;
            let refitted = fitted.from_flat(&run.params);
            Ok(bootstrap_statistic(
                data,
                &fitted,
                &refitted,
                &spec.inputs_under_test,
                sum_m_fitted,
                &sum_grad_fitted,
            ) / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    let exceed_count = boot_stats.iter().filter(|&&s| s > m_hat).count();
    let p_value = p_value_from_counts(exceed_count, spec.replications);
    Ok((
        fitted,
        BootstrapResult {
            m_hat,
            boot_stats,
            exceed_count,
            p_value,
        },
    ))
}

/// `(k + 1) / (v + 1)`.
pub fn p_value_from_counts(exceed_count: usize, replications: usize) -> f64 {
    (exceed_count + 1) as f64 / (replications + 1) as f64
}

fn standardize_inputs(data: &LagDataset) -> LagDataset {
    let rows: Vec<usize> = (0..data.len()).collect();
    let mut out = data.take_rows(&rows);
    let inputs = out.inputs_mut();
    for c in 0..inputs.ncols() {
        let col = inputs.column(c);
        let mean = col.mean().unwrap();
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / col.len() as f64;
        let sd = var.sqrt();
        if sd > 0.0 {
            for v in inputs.column_mut(c).iter_mut() {
                *v = (*v - mean) / sd;
            }
        }
    }
    out
}

/// Joint verdict over the per-model p-values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BonferroniReport {
    pub p_values: Vec<f64>,
    pub m_models: usize,
    /// Smallest p-value, P_(1).
    pub smallest_p: f64,
    /// m * P_(1).
    pub bound: f64,
    pub alpha: f64,
    pub reject: bool,
}

/// Bonferroni rule: reject at level alpha when m * P_(1) <= alpha.
pub fn bonferroni(p_values: &[f64], alpha: f64) -> Result<BonferroniReport> {
    if p_values.is_empty() {
        return Err(Error::Argument("need at least one p-value".into()));
    }
    if p_values.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::Argument("p-values must lie in (0, 1]".into()));
    }
    let m_models = p_values.len();
    let smallest_p = p_values.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = m_models as f64 * smallest_p;
    Ok(BonferroniReport {
        p_values: p_values.to_vec(),
        m_models,
        smallest_p,
        bound,
        alpha,
        reject: bound <= alpha,
    })
}

/// One (ticker, lag count) cell of the relevance grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelResult {
    pub ticker: String,
    pub lags: usize,
    pub m_hat: f64,
    pub p_value: f64,
    pub replications: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub boot_stats: Vec<f64>,
}

/// Full grid outcome: per-model results plus the joint Bonferroni verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelevanceReport {
    pub models: Vec<ModelResult>,
    pub bonferroni: BonferroniReport,
}

/// Run the published grid: for each ticker and each lag count in
/// [`PAPER_LAG_COUNTS`], build the log-return windows, keep rows whose
/// target predates the cutoff, and bootstrap-test the relevance of all
/// inputs. Per-model seeds derive from `(seed, ticker, m)`.
pub fn run_paper_grid(
    corpus: &[PriceSeries],
    tickers: &[String],
    alpha: f64,
    replications: usize,
    seed: u64,
    cutoff: NaiveDate,
    config: &RelevanceConfig,
) -> Result<RelevanceReport> {
    let mut models = Vec::new();
    for ticker in tickers {
        let series = corpus
            .iter()
            .find(|s| s.ticker() == ticker)
            .ok_or_else(|| Error::Config(format!("ticker {ticker} not found in corpus")))?;
        let returns = apply_transform(series, Transform::DiffLog)?;
        for &m in &PAPER_LAG_COUNTS {
            let dataset = build_lag_dataset(std::slice::from_ref(&returns), m)?;
            let (train_rows, _test_rows) =
                split_lag_dataset(&dataset, &SplitSpec::Temporal { cutoff })?;
            let model_seed = derive_seed_indexed(seed, &format!("model.{ticker}"), m as u64);
            let mut spec = RelevanceSpec::all_inputs(m, replications, model_seed);
            spec.cutoff = cutoff;
            let (_net, result) = bootstrap_test(&train_rows, &spec, config)?;
            models.push(ModelResult {
                ticker: ticker.clone(),
                lags: m,
                m_hat: result.m_hat,
                p_value: result.p_value,
                replications,
                seed: model_seed,
                boot_stats: result.boot_stats,
            });
        }
    }
    let p_values: Vec<f64> = models.iter().map(|m| m.p_value).collect();
    let bonferroni = bonferroni(&p_values, alpha)?;
    Ok(RelevanceReport { models, bonferroni })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn central_diff(f: impl Fn(f64) -> f64, at: f64, h: f64) -> f64 {
        (f(at + h) - f(at - h)) / (2.0 * h)
    }

    /// Relative error with a floor that keeps near-zero coordinates from
    /// amplifying finite-difference noise.
    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
    }

    #[test]
    fn zero_output_weights_kill_every_input_gradient() {
        let mut net = TestNetwork::init(4, 3, 7);
        net.output_weights.iter_mut().for_each(|w| *w = 0.0);
        for i in 0..3 {
            assert_eq!(input_gradient(&net, &[0.3, -0.5, 0.9], i), 0.0);
        }
    }

    #[test]
    fn single_neuron_unit_gradient() {
        // J = 1, w01 = 1, w11 = (0, 1): f_1(0) = psi'(0) = 1.
        let mut net = TestNetwork::zeros(1, 1);
        net.output_weights[0] = 1.0;
        net.hidden_weights[0] = vec![0.0, 1.0];
        assert_eq!(input_gradient(&net, &[0.0], 0), 1.0);
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let net = TestNetwork::init(6, 4, 31);
        let x = [0.4, -1.2, 0.05, 0.7];
        for i in 0..4 {
            let fd = central_diff(
                |v| {
                    let mut xp = x;
                    xp[i] = v;
                    net.forward(&xp)
                },
                x[i],
                1e-6,
            );
            let analytic = input_gradient(&net, &x, i);
            assert!(
                rel_err(analytic, fd) < 1e-7,
                "input {i}: {analytic} vs {fd}"
            );
        }
    }

    #[test]
    fn m_statistic_trivial_cases() {
        let mut net = TestNetwork::init(4, 2, 3);
        net.output_weights.iter_mut().for_each(|w| *w = 0.0);
        let inputs = Array2::from_shape_vec((3, 2), vec![0.1; 6]).unwrap();
        assert_eq!(m_statistic(&net, &inputs, &[0, 1]), 0.0);

        // Single observation from the unit-gradient example: m-hat = 1.
        let mut unit = TestNetwork::zeros(1, 1);
        unit.output_weights[0] = 1.0;
        unit.hidden_weights[0] = vec![0.0, 1.0];
        let single = Array2::zeros((1, 1));
        assert_eq!(m_statistic(&unit, &single, &[0]), 1.0);
    }

    #[test]
    fn m_statistic_matches_brute_force_mean() {
        let net = TestNetwork::init(5, 3, 17);
        let inputs =
            Array2::from_shape_vec((3, 3), vec![0.2, -0.4, 0.9, 1.1, 0.0, -0.3, 0.5, 0.5, 0.5])
                .unwrap();
        let subset = [0usize, 2];
        // Independent loop over observations and inputs.
        let mut total = 0.0;
        for r in 0..3 {
            let x: Vec<f64> = inputs.row(r).to_vec();
            for &i in &subset {
                let g = input_gradient(&net, &x, i);
                total += g * g;
            }
        }
        let expected = total / 3.0;
        let got = m_statistic(&net, &inputs, &subset);
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn m_weight_gradient_output_bias_component_is_zero() {
        let net = TestNetwork::init(6, 3, 5);
        let grad = m_weight_gradient(&net, &[0.3, -0.2, 0.8], &[0, 1, 2]);
        assert_eq!(grad[0], 0.0);
    }

    #[test]
    fn m_weight_gradient_vanishes_at_zero_output_weights() {
        let mut net = TestNetwork::init(4, 2, 9);
        net.output_weights.iter_mut().for_each(|w| *w = 0.0);
        let grad = m_weight_gradient(&net, &[0.5, -0.5], &[0, 1]);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn m_weight_gradient_matches_finite_differences() {
        let net = TestNetwork::init(4, 3, 23);
        let x = [0.6, -0.9, 0.25];
        let subset = [0usize, 2];
        let analytic = m_weight_gradient(&net, &x, &subset);
        let flat = net.to_flat();
        for k in 0..flat.len() {
            let fd = central_diff(
                |v| {
                    let mut f = flat.clone();
                    f[k] = v;
                    per_observation_m(&net.from_flat(&f), &x, &subset)
                },
                flat[k],
                1e-5,
            );
            assert!(
                rel_err(analytic[k], fd) < 1e-6,
                "coordinate {k}: {} vs {fd}",
                analytic[k]
            );
        }
    }

    #[test]
    fn bootstrap_statistic_is_zero_when_refit_equals_fit() {
        use crate::series::build_lag_dataset;
        let series = crate::synth::generate(&crate::synth::GeneratorSpec {
            kind: crate::synth::GeneratorKind::RandomWalk { sigma: 0.05 },
            length: 40,
            initial_log_price: 4.0,
            seed: 2,
            start_date: "1990-01-31".parse().unwrap(),
            frequency: crate::date::Frequency::Monthly,
        })
        .unwrap();
        let returns = apply_transform(&series, Transform::DiffLog).unwrap();
        let data = build_lag_dataset(std::slice::from_ref(&returns), 2).unwrap();
        let net = TestNetwork::init(4, 2, 11);
        let subset = [0usize, 1];
        let mut sum_m = 0.0;
        let mut sum_grad = vec![0.0; net.param_count()];
        for r in 0..data.len() {
            let x = data.inputs().row(r);
            sum_m += per_observation_m(&net, x.as_slice().unwrap(), &subset);
            for (acc, g) in sum_grad
                .iter_mut()
                .zip(m_weight_gradient(&net, x.as_slice().unwrap(), &subset))
            {
                *acc += g;
            }
        }
        let stat = bootstrap_statistic(&data, &net, &net, &subset, sum_m, &sum_grad);
        assert_eq!(stat, 0.0);
    }

    #[test]
    fn p_value_formula() {
        assert!((p_value_from_counts(3, 1000) - 4.0 / 1001.0).abs() < 1e-15);
        assert!((p_value_from_counts(3, 1000) - 0.003996).abs() < 1e-6);
        assert_eq!(p_value_from_counts(0, 1), 0.5);
        // Weak monotonicity in v for fixed k.
        for k in 0..5usize {
            for v in k.max(1)..50 {
                assert!(p_value_from_counts(k, v + 1) <= p_value_from_counts(k, v));
            }
        }
    }

    #[test]
    fn bonferroni_reproduces_published_decision() {
        let mut p_values = vec![0.5, 0.2, 0.0059];
        p_values.extend(std::iter::repeat(0.8).take(12));
        assert_eq!(p_values.len(), 15);
        let report = bonferroni(&p_values, 0.10).unwrap();
        assert!((report.bound - 0.0885).abs() < 1e-12);
        assert!(report.reject);
        assert_eq!(report.smallest_p, 0.0059);
    }

    #[test]
    fn bonferroni_simple_cases() {
        let single = bonferroni(&[0.5], 0.10).unwrap();
        assert!(!single.reject);
        let three = bonferroni(&[0.02, 0.5, 0.9], 0.10).unwrap();
        assert!((three.bound - 0.06).abs() < 1e-12);
        assert!(three.reject);
        assert!(bonferroni(&[], 0.10).is_err());
        assert!(bonferroni(&[0.0], 0.10).is_err());
    }
}

//! Diagnostic harness for the bootstrap size/power experiments.
//!
//! Prints per-test m-hat, bootstrap-statistic quantiles and p-values so the
//! Monte Carlo training budget can be sanity-checked. Not part of the test
//! suite.

use emh_core::relevance::{bootstrap_test, RelevanceConfig, RelevanceSpec};
use emh_core::series::{apply_transform, build_lag_dataset, LagDataset};
use emh_core::synth::{generate, GeneratorKind, GeneratorSpec};
use emh_core::Transform;
use std::time::Instant;

fn dataset(kind: GeneratorKind, seed: u64, rows: usize, m: usize) -> LagDataset {
    let series = generate(&GeneratorSpec {
        kind,
        length: rows + m + 1,
        initial_log_price: 4.6,
        seed,
        start_date: "1980-01-31".parse().unwrap(),
        frequency: emh_core::Frequency::Monthly,
    })
    .unwrap();
    let returns = apply_transform(&series, Transform::DiffLog).unwrap();
    build_lag_dataset(std::slice::from_ref(&returns), m).unwrap()
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let tests: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let v: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    let phi: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.0);

    let config = RelevanceConfig::monte_carlo_default();
    println!(
        "config: fit {} steps, refit {} steps, batch {}, J {}",
        config.fit_steps, config.refit_steps, config.batch_size, config.hidden_count
    );
    println!("tests {tests}, v {v}, phi {phi}");

    let mut rejections = 0;
    for t in 0..tests {
        let start = Instant::now();
        let kind = if phi == 0.0 {
            GeneratorKind::RandomWalk { sigma: 0.05 }
        } else {
            GeneratorKind::Ar1Returns { phi, sigma: 0.05 }
        };
        let data = dataset(kind, 0x5123 + t as u64, 400, 1);
        let spec = RelevanceSpec::all_inputs(1, v, 0x9000 + t as u64);
        let (_, result) = bootstrap_test(&data, &spec, &config).unwrap();
        let mut sorted = result.boot_stats.clone();
        sorted.sort_by(f64::total_cmp);
        let reject = result.p_value <= 0.10;
        rejections += usize::from(reject);
        println!(
            "test {t:2}: m_hat {:>12.3e}  boot q10/q50/q90 {:>12.3e} {:>12.3e} {:>12.3e}  k {:3}  p {:.4}  reject {}  ({:.1}s)",
            result.m_hat,
            quantile(&sorted, 0.10),
            quantile(&sorted, 0.50),
            quantile(&sorted, 0.90),
            result.exceed_count,
            result.p_value,
            reject,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "rejections: {rejections}/{tests} ({:.3})",
        rejections as f64 / tests as f64
    );
}

//! Price series, transforms, and the two model-ready representations.
//!
//! A [`PriceSeries`] is a ticker's closing prices on a uniform month grid.
//! [`build_padded_panel`] turns a set of series into the N x T x 3 tensor a
//! recurrent model consumes (time, past value, current value per step, short
//! series front-padded with zeros). [`build_lag_dataset`] turns the same
//! series into stacked sliding-window rows for a feedforward model. Both are
//! pure functions; every value here is immutable once built.

use crate::date::{advance, Frequency};
use crate::error::{Error, Result};
use crate::rng::Rng64;
use chrono::NaiveDate;
use ndarray::{Array1, Array2, Array3, Axis};

/// One ticker's dated observations with uniform spacing.
///
/// Timestamps are derived from `start` and `frequency`, so strict increase
/// and uniform spacing hold by construction. Raw price series carry strictly
/// positive values; transformed series (log returns) may not, which is why
/// positivity is enforced at ingest and at transform call sites rather than
/// here.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    ticker: String,
    start: NaiveDate,
    frequency: Frequency,
    values: Vec<f64>,
}

impl PriceSeries {
    pub fn new(
        ticker: impl Into<String>,
        start: NaiveDate,
        frequency: Frequency,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("series must hold at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "series value at index {i} is not finite"
            )));
        }
        Ok(Self {
            ticker: ticker.into(),
            start,
            frequency,
            values,
        })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    /// Date of the observation at `index`.
    pub fn date_at(&self, index: usize) -> NaiveDate {
        advance(self.start, self.frequency, index)
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.values.len()).map(|i| self.date_at(i))
    }
}

/// Value transform applied before model construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    /// Identity.
    Level,
    /// Elementwise natural log.
    Log,
    /// First difference of the logs; output is one shorter and starts at the
    /// second timestamp.
    DiffLog,
}

/// Apply a transform to a series.
///
/// Log transforms require strictly positive input; a violation reports the
/// ticker and the offending index.
pub fn apply_transform(series: &PriceSeries, transform: Transform) -> Result<PriceSeries> {
    match transform {
        Transform::Level => Ok(series.clone()),
        Transform::Log => {
            let values = checked_logs(series)?;
            PriceSeries::new(series.ticker.clone(), series.start, series.frequency, values)
        }
        Transform::DiffLog => {
            if series.len() < 2 {
                return Err(Error::Argument(format!(
                    "series {}: diff-log needs at least 2 observations",
                    series.ticker
                )));
            }
            let logs = checked_logs(series)?;
            let values = logs.windows(2).map(|w| w[1] - w[0]).collect();
            PriceSeries::new(
                series.ticker.clone(),
                series.date_at(1),
                series.frequency,
                values,
            )
        }
    }
}

fn checked_logs(series: &PriceSeries) -> Result<Vec<f64>> {
    series
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(Error::NonPositiveValue {
                    ticker: series.ticker.clone(),
                    index: i,
                    value: v,
                })
            }
        })
        .collect()
}

/// N x T x 3 zero-augmented tensor for recurrent training.
///
/// For a series of length `T_n` the usable rows are the `T_n - 1` pairs
/// (time, previous value, current value); the first observation has no
/// history and is lost. `T` is the maximum usable row count over the panel
/// and shorter series are front-padded with rows whose value columns are
/// exactly zero and whose time column keeps stepping backwards by delta-t.
///
/// The time column is the uniform grid `k * delta_t` with `k = 1` at each
/// series' first usable row, so padded rows carry `k <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedPanel {
    data: Array3<f64>,
    /// Usable (non-padded) rows per series; equals source length minus one.
    lengths: Vec<usize>,
    tickers: Vec<String>,
    frequency: Frequency,
}

impl PaddedPanel {
    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn series_count(&self) -> usize {
        self.data.shape()[0]
    }

    pub fn time_steps(&self) -> usize {
        self.data.shape()[1]
    }

    /// Usable rows for series `n`; rows before `time_steps() - rows(n)` are
    /// padding.
    pub fn rows(&self, n: usize) -> usize {
        self.lengths[n]
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    /// Padding rows in front of series `n`.
    pub fn pad_rows(&self, n: usize) -> usize {
        self.time_steps() - self.lengths[n]
    }

    /// Target column (current value) as an N x T view-owned array.
    pub fn targets(&self) -> Array2<f64> {
        self.data.index_axis(Axis(2), 2).to_owned()
    }

    /// Select a subset of series, recompacting T to the subset's maximum.
    pub fn select(&self, indices: &[usize]) -> Result<PaddedPanel> {
        if indices.is_empty() {
            return Err(Error::Config("panel selection is empty".into()));
        }
        let new_t = indices.iter().map(|&i| self.lengths[i]).max().unwrap();
        let offset = self.time_steps() - new_t;
        let mut data = Array3::zeros((indices.len(), new_t, 3));
        let mut lengths = Vec::with_capacity(indices.len());
        let mut tickers = Vec::with_capacity(indices.len());
        for (row, &i) in indices.iter().enumerate() {
            data.index_axis_mut(Axis(0), row)
                .assign(&self.data.slice(ndarray::s![i, offset.., ..]));
            lengths.push(self.lengths[i]);
            tickers.push(self.tickers[i].clone());
        }
        Ok(PaddedPanel {
            data,
            lengths,
            tickers,
            frequency: self.frequency,
        })
    }
}

/// Build the padded panel from a list of series sharing one frequency.
pub fn build_padded_panel(series_list: &[PriceSeries]) -> Result<PaddedPanel> {
    if series_list.is_empty() {
        return Err(Error::Argument("panel needs at least one series".into()));
    }
    let frequency = series_list[0].frequency;
    for s in series_list {
        if s.frequency != frequency {
            return Err(Error::Config(format!(
                "mixed frequencies in panel: {} is {}, expected {}",
                s.ticker, s.frequency, frequency
            )));
        }
        if s.len() < 2 {
            return Err(Error::Argument(format!(
                "series {} has {} observation(s); panels need at least 2",
                s.ticker,
                s.len()
            )));
        }
    }
    let delta_t = frequency.delta_t();
    let t_max = series_list.iter().map(|s| s.len() - 1).max().unwrap();
    let mut data = Array3::zeros((series_list.len(), t_max, 3));
    let mut lengths = Vec::with_capacity(series_list.len());
    let mut tickers = Vec::with_capacity(series_list.len());
    for (n, s) in series_list.iter().enumerate() {
        let rows = s.len() - 1;
        let pad = t_max - rows;
        for r in 0..t_max {
            // Row r holds grid index k with k = 1 at the first usable row;
            // padding rows continue the time column backwards (k <= 0).
            let k = r as isize - pad as isize + 1;
            data[[n, r, 0]] = k as f64 * delta_t;
            if r >= pad {
                let i = r - pad; // 0-based usable row
                data[[n, r, 1]] = s.values[i];
                data[[n, r, 2]] = s.values[i + 1];
            }
        }
        lengths.push(rows);
        tickers.push(s.ticker.clone());
    }
    Ok(PaddedPanel {
        data,
        lengths,
        tickers,
        frequency,
    })
}

/// Per-row provenance of a lag-dataset sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOrigin {
    pub ticker: String,
    /// Index of the target observation within its source series.
    pub target_index: usize,
    pub target_date: NaiveDate,
}

/// Stacked (X, Y) sliding-window matrices for feedforward training.
///
/// Row t of a series' block is the window `[x_t, ..., x_{t+m-1}]` with
/// target `x_{t+m}`; blocks for all series are stacked in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct LagDataset {
    inputs: Array2<f64>,
    targets: Array1<f64>,
    lag_count: usize,
    origins: Vec<SampleOrigin>,
    skipped: Vec<String>,
}

impl LagDataset {
    pub fn inputs(&self) -> &Array2<f64> {
        &self.inputs
    }

    pub(crate) fn inputs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.inputs
    }

    pub fn targets(&self) -> &Array1<f64> {
        &self.targets
    }

    pub fn lag_count(&self) -> usize {
        self.lag_count
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn origins(&self) -> &[SampleOrigin] {
        &self.origins
    }

    /// Tickers skipped because they had no full window (T_n <= m).
    pub fn skipped(&self) -> &[String] {
        &self.skipped
    }

    /// Dataset from bare matrices, for synthetic regression problems with
    /// no series provenance. Origins carry a placeholder ticker and the
    /// row index.
    pub fn from_parts(inputs: Array2<f64>, targets: Array1<f64>) -> Result<LagDataset> {
        if inputs.nrows() != targets.len() {
            return Err(Error::Shape(format!(
                "{} input rows vs {} targets",
                inputs.nrows(),
                targets.len()
            )));
        }
        if inputs.ncols() == 0 {
            return Err(Error::Argument("inputs need at least one column".into()));
        }
        let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap();
        let origins = (0..targets.len())
            .map(|r| SampleOrigin {
                ticker: "synthetic".into(),
                target_index: r,
                target_date: epoch,
            })
            .collect();
        Ok(LagDataset {
            lag_count: inputs.ncols(),
            inputs,
            targets,
            origins,
            skipped: Vec::new(),
        })
    }

    /// New dataset holding the given rows, in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> LagDataset {
        let mut inputs = Array2::zeros((rows.len(), self.lag_count));
        let mut targets = Array1::zeros(rows.len());
        let mut origins = Vec::with_capacity(rows.len());
        for (out, &r) in rows.iter().enumerate() {
            inputs.row_mut(out).assign(&self.inputs.row(r));
            targets[out] = self.targets[r];
            origins.push(self.origins[r].clone());
        }
        LagDataset {
            inputs,
            targets,
            lag_count: self.lag_count,
            origins,
            skipped: Vec::new(),
        }
    }
}

/// Build the stacked lag dataset with window length `m`.
///
/// Series too short for a single window (`T_n <= m`) are skipped and listed
/// in [`LagDataset::skipped`] rather than failing the build.
pub fn build_lag_dataset(series_list: &[PriceSeries], m: usize) -> Result<LagDataset> {
    if m < 1 {
        return Err(Error::Argument("lag count m must be at least 1".into()));
    }
    let mut skipped = Vec::new();
    let mut total_rows = 0usize;
    for s in series_list {
        if s.len() > m {
            total_rows += s.len() - m;
        } else {
            skipped.push(s.ticker.clone());
        }
    }
    let mut inputs = Array2::zeros((total_rows, m));
    let mut targets = Array1::zeros(total_rows);
    let mut origins = Vec::with_capacity(total_rows);
    let mut row = 0usize;
    for s in series_list {
        if s.len() <= m {
            continue;
        }
        for t in 0..s.len() - m {
            for j in 0..m {
                inputs[[row, j]] = s.values[t + j];
            }
            targets[row] = s.values[t + m];
            origins.push(SampleOrigin {
                ticker: s.ticker.clone(),
                target_index: t + m,
                target_date: s.date_at(t + m),
            });
            row += 1;
        }
    }
    Ok(LagDataset {
        inputs,
        targets,
        lag_count: m,
        origins,
        skipped,
    })
}

/// Train/test partition rule.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SplitSpec {
    /// Seeded shuffle; the first `floor(train_fraction * total)` units go to
    /// the train side.
    Random { train_fraction: f64, seed: u64 },
    /// Units whose (target) date is strictly before the cutoff go to the
    /// train side; boundary dates land in test.
    Temporal { cutoff: NaiveDate },
}

fn random_partition(total: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must be in (0, 1), got {fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..total).collect();
    Rng64::new(seed).shuffle(&mut order);
    let n_train = (total as f64 * fraction).floor() as usize;
    let test = order.split_off(n_train);
    Ok((order, test))
}

fn check_nonempty(train: usize, test: usize) -> Result<()> {
    if train == 0 || test == 0 {
        return Err(Error::Config(format!(
            "split produced an empty partition (train {train}, test {test})"
        )));
    }
    Ok(())
}

/// Split a lag dataset row-wise.
pub fn split_lag_dataset(
    dataset: &LagDataset,
    spec: &SplitSpec,
) -> Result<(LagDataset, LagDataset)> {
    let (mut train_rows, mut test_rows) = match *spec {
        SplitSpec::Random {
            train_fraction,
            seed,
        } => random_partition(dataset.len(), train_fraction, seed)?,
        SplitSpec::Temporal { cutoff } => {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (r, origin) in dataset.origins().iter().enumerate() {
                if origin.target_date < cutoff {
                    train.push(r);
                } else {
                    test.push(r);
                }
            }
            (train, test)
        }
    };
    check_nonempty(train_rows.len(), test_rows.len())?;
    // Keep source order inside each side so splits are set-valued, not
    // shuffle-order-valued.
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok((dataset.take_rows(&train_rows), dataset.take_rows(&test_rows)))
}

/// Split a panel by whole series. Temporal splits need per-row dates, which
/// panels do not carry, so only random splits apply here.
pub fn split_panel(panel: &PaddedPanel, spec: &SplitSpec) -> Result<(PaddedPanel, PaddedPanel)> {
    match *spec {
        SplitSpec::Random {
            train_fraction,
            seed,
        } => {
            let (mut train, mut test) =
                random_partition(panel.series_count(), train_fraction, seed)?;
            check_nonempty(train.len(), test.len())?;
            train.sort_unstable();
            test.sort_unstable();
            Ok((panel.select(&train)?, panel.select(&test)?))
        }
        SplitSpec::Temporal { .. } => Err(Error::Config(
            "temporal splits require per-row timestamps; panels are split randomly by series"
                .into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn series(ticker: &str, values: &[f64]) -> PriceSeries {
        PriceSeries::new(ticker, d("2000-01-31"), Frequency::Quarterly, values.to_vec()).unwrap()
    }

    #[test]
    fn diff_log_of_constant_prices_is_zero() {
        let s = series("A", &[100.0, 100.0]);
        let out = apply_transform(&s, Transform::DiffLog).unwrap();
        assert_eq!(out.values(), &[0.0]);
        assert_eq!(out.start(), d("2000-04-30"));
    }

    #[test]
    fn diff_log_single_return() {
        let s = series("A", &[100.0, 110.0]);
        let out = apply_transform(&s, Transform::DiffLog).unwrap();
        assert!((out.values()[0] - 1.1f64.ln()).abs() < 1e-12);
        assert!((out.values()[0] - 0.095310).abs() < 1e-6);
    }

    #[test]
    fn level_is_identity() {
        let s = series("A", &[5.0, 7.0]);
        let out = apply_transform(&s, Transform::Level).unwrap();
        assert_eq!(out.values(), &[5.0, 7.0]);
    }

    #[test]
    fn log_rejects_non_positive_values() {
        let s = series("BAD", &[5.0, 0.0, 7.0]);
        match apply_transform(&s, Transform::Log) {
            Err(Error::NonPositiveValue { ticker, index, .. }) => {
                assert_eq!(ticker, "BAD");
                assert_eq!(index, 1);
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn panel_pads_shorter_series() {
        let a = series("A", &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = series("B", &[10.0, 20.0, 30.0]);
        let panel = build_padded_panel(&[a, b]).unwrap();
        assert_eq!(panel.time_steps(), 4);
        assert_eq!(panel.rows(0), 4);
        assert_eq!(panel.rows(1), 2);
        assert_eq!(panel.pad_rows(1), 2);
        // Padded value columns are exactly zero.
        for r in 0..2 {
            assert_eq!(panel.data()[[1, r, 1]], 0.0);
            assert_eq!(panel.data()[[1, r, 2]], 0.0);
        }
        // Time column keeps stepping by delta-t through the padding.
        let dt = Frequency::Quarterly.delta_t();
        for r in 1..4 {
            let step = panel.data()[[1, r, 0]] - panel.data()[[1, r - 1, 0]];
            assert!((step - dt).abs() < 1e-12);
        }
        // First usable row of B sits at time 1 * delta_t.
        assert!((panel.data()[[1, 2, 0]] - dt).abs() < 1e-12);
    }

    #[test]
    fn panel_rows_follow_shift_relation() {
        let s = series("A", &[7.0, 8.0, 9.0]);
        let panel = build_padded_panel(&[s]).unwrap();
        let dt = Frequency::Quarterly.delta_t();
        assert_eq!(panel.time_steps(), 2);
        assert_eq!(panel.data()[[0, 0, 0]], dt);
        assert_eq!(panel.data()[[0, 0, 1]], 7.0);
        assert_eq!(panel.data()[[0, 0, 2]], 8.0);
        assert_eq!(panel.data()[[0, 1, 0]], 2.0 * dt);
        assert_eq!(panel.data()[[0, 1, 1]], 8.0);
        assert_eq!(panel.data()[[0, 1, 2]], 9.0);
    }

    #[test]
    fn panel_of_439_series_with_max_length_175_has_t_174() {
        let mut list = Vec::new();
        for i in 0..439usize {
            let len = 16 + (i % 160);
            let values: Vec<f64> = (0..len).map(|k| 1.0 + k as f64).collect();
            list.push(series(&format!("S{i:03}"), &values));
        }
        let values: Vec<f64> = (0..175).map(|k| 1.0 + k as f64).collect();
        list[0] = series("S000", &values);
        let panel = build_padded_panel(&list).unwrap();
        assert_eq!(panel.series_count(), 439);
        assert_eq!(panel.time_steps(), 174);
    }

    #[test]
    fn panel_rejects_mixed_frequencies() {
        let a = series("A", &[1.0, 2.0]);
        let b = PriceSeries::new("B", d("2000-01-31"), Frequency::Monthly, vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            build_padded_panel(&[a, b]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn lag_dataset_windows_match_definition() {
        let s = series("A", &[0.0, 0.1, 0.2, 0.3, 0.4]);
        let ds = build_lag_dataset(&[s], 2).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.inputs().row(0).to_vec(), vec![0.0, 0.1]);
        assert_eq!(ds.inputs().row(1).to_vec(), vec![0.1, 0.2]);
        assert_eq!(ds.inputs().row(2).to_vec(), vec![0.2, 0.3]);
        assert_eq!(ds.targets().to_vec(), vec![0.2, 0.3, 0.4]);
        assert_eq!(ds.origins()[0].target_index, 2);
    }

    #[test]
    fn lag_dataset_minimum_window_count() {
        let values: Vec<f64> = (0..16).map(|k| k as f64).collect();
        let s = series("A", &values);
        let ds = build_lag_dataset(&[s], 15).unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn lag_dataset_row_count_matches_brute_force() {
        // Oracle: enumerate every window start explicitly.
        let lens = [10usize, 12];
        let m = 5;
        let mut expected = 0;
        for &len in &lens {
            let mut count = 0;
            let mut t = 0;
            while t + m < len {
                count += 1;
                t += 1;
            }
            expected += count;
        }
        assert_eq!(expected, 12);
        let list: Vec<PriceSeries> = lens
            .iter()
            .enumerate()
            .map(|(i, &len)| {
                series(
                    &format!("S{i}"),
                    &(0..len).map(|k| k as f64).collect::<Vec<_>>(),
                )
            })
            .collect();
        let ds = build_lag_dataset(&list, m).unwrap();
        assert_eq!(ds.len(), expected);
    }

    #[test]
    fn lag_dataset_skips_short_series() {
        let a = series("LONG", &(0..8).map(|k| k as f64).collect::<Vec<_>>());
        let b = series("SHORT", &[1.0, 2.0, 3.0]);
        let ds = build_lag_dataset(&[a, b], 3).unwrap();
        assert_eq!(ds.skipped(), &["SHORT".to_string()]);
        assert_eq!(ds.len(), 5);
    }

    #[test]
    fn lag_dataset_rejects_zero_m() {
        let s = series("A", &[1.0, 2.0]);
        assert!(matches!(
            build_lag_dataset(&[s], 0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn random_panel_split_is_67_33() {
        let list: Vec<PriceSeries> = (0..100)
            .map(|i| series(&format!("S{i}"), &[1.0, 2.0, 3.0]))
            .collect();
        let panel = build_padded_panel(&list).unwrap();
        let spec = SplitSpec::Random {
            train_fraction: 0.67,
            seed: 7,
        };
        let (train, test) = split_panel(&panel, &spec).unwrap();
        assert_eq!(train.series_count(), 67);
        assert_eq!(test.series_count(), 33);
    }

    #[test]
    fn temporal_split_boundary_goes_to_test() {
        let s = PriceSeries::new(
            "A",
            d("2015-03-31"),
            Frequency::Quarterly,
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
        )
        .unwrap();
        // With m = 3 the two targets sit at indices 3 and 4, dated
        // 2015-12-31 and 2016-03-31.
        let ds = build_lag_dataset(&[s], 3).unwrap();
        let (train, test) = split_lag_dataset(
            &ds,
            &SplitSpec::Temporal {
                cutoff: d("2016-01-01"),
            },
        )
        .unwrap();
        assert_eq!(train.len(), 1);
        assert_eq!(train.origins()[0].target_date, d("2015-12-31"));
        assert_eq!(test.len(), 1);
        assert_eq!(test.origins()[0].target_date, d("2016-03-31"));
    }

    #[test]
    fn split_is_deterministic_for_a_seed() {
        let list: Vec<PriceSeries> = (0..30)
            .map(|i| series(&format!("S{i}"), &[1.0, 2.0, 3.0, 4.0]))
            .collect();
        let ds = build_lag_dataset(&list, 2).unwrap();
        let spec = SplitSpec::Random {
            train_fraction: 0.5,
            seed: 11,
        };
        let (tr1, te1) = split_lag_dataset(&ds, &spec).unwrap();
        let (tr2, te2) = split_lag_dataset(&ds, &spec).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
    }

    #[test]
    fn temporal_split_on_panel_is_a_config_error() {
        let panel = build_padded_panel(&[series("A", &[1.0, 2.0])]).unwrap();
        assert!(matches!(
            split_panel(
                &panel,
                &SplitSpec::Temporal {
                    cutoff: d("2016-01-01")
                }
            ),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_partition_is_rejected() {
        let ds = build_lag_dataset(&[series("A", &[1.0, 2.0, 3.0])], 1).unwrap();
        // All targets share dates before the cutoff -> empty test side.
        let result = split_lag_dataset(
            &ds,
            &SplitSpec::Temporal {
                cutoff: d("2030-01-01"),
            },
        );
        assert!(matches!(result, Err(Error::Config(_))));
    }
}

//! Flat-file corpus loading.
//!
//! Each ticker lives in its own CSV with a `date,close` header, ISO-8601
//! dates and positive decimal closes. A corpus manifest is a JSON file
//! naming the frequency, the minimum retained length and a ticker-to-path
//! map. Series shorter than the minimum are dropped (and reported), series
//! with duplicate dates or holes in the month grid are rejected outright:
//! the padding semantics downstream assume contiguous observations, and
//! filling holes would fabricate "zero change" data inside a series.

use crate::date::{month_index, Frequency};
use crate::error::{Error, Result};
use crate::series::PriceSeries;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

pub const DEFAULT_MIN_LENGTH: usize = 16;

fn default_min_length() -> usize {
    DEFAULT_MIN_LENGTH
}

/// JSON manifest describing a corpus of per-ticker CSV files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub frequency: Frequency,
    #[serde(default = "default_min_length")]
    pub min_length: usize,
    /// Ticker -> CSV path, relative to the manifest file.
    pub series: BTreeMap<String, PathBuf>,
}

impl CorpusManifest {
    pub fn from_json(json: &str) -> Result<Self> {
        let manifest: CorpusManifest = serde_json::from_str(json)?;
        if manifest.min_length < 2 {
            return Err(Error::Config(format!(
                "min_length must be at least 2, got {}",
                manifest.min_length
            )));
        }
        if manifest.series.is_empty() {
            return Err(Error::Config("manifest lists no series".into()));
        }
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        Self::from_json(&json)
    }
}

/// Corpus summary: retained count, min/max lengths and the histogram of
/// observed years per series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_series: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Observed-years bucket (length / periods-per-year) -> series count.
    pub length_histogram: BTreeMap<u32, usize>,
}

/// One rejected series and why.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DropRecord {
    pub ticker: String,
    pub reason: String,
    pub length: usize,
    pub min_length: usize,
}

/// Parse one ticker's price history from CSV text.
///
/// Rows may arrive unsorted; they are ordered by date before grid checks.
/// `source` only labels error messages.
pub fn parse_price_csv(
    text: &str,
    ticker: &str,
    frequency: Frequency,
    source: &str,
) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("{source}: {e}")))?
        .clone();
    let date_col = headers
        .iter()
        .position(|h| h == "date")
        .ok_or_else(|| Error::Schema(format!("{source}: missing required column `date`")))?;
    let close_col = headers
        .iter()
        .position(|h| h == "close")
        .ok_or_else(|| Error::Schema(format!("{source}: missing required column `close`")))?;

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 2; // 1-based, counting the header line
        let record = record.map_err(|e| Error::Data {
            path: source.to_string(),
            row: row_no,
            message: e.to_string(),
        })?;
        let date: NaiveDate = record
            .get(date_col)
            .unwrap_or("")
            .parse()
            .map_err(|e| Error::Data {
                path: source.to_string(),
                row: row_no,
                message: format!("bad date: {e}"),
            })?;
        let close: f64 = record
            .get(close_col)
            .unwrap_or("")
            .parse()
            .map_err(|e| Error::Data {
                path: source.to_string(),
                row: row_no,
                message: format!("bad close: {e}"),
            })?;
        if !close.is_finite() || close <= 0.0 {
            return Err(Error::Data {
                path: source.to_string(),
                row: row_no,
                message: format!("close must be a positive finite number, got {close}"),
            });
        }
        rows.push((date, close));
    }
    if rows.len() < 2 {
        return Err(Error::Data {
            path: source.to_string(),
            row: rows.len() + 1,
            message: format!("series needs at least 2 rows, found {}", rows.len()),
        });
    }
    rows.sort_by_key(|(date, _)| *date);
    let step = i64::from(frequency.months_per_step());
    for w in rows.windows(2) {
        let (d0, d1) = (w[0].0, w[1].0);
        if d0 == d1 {
            return Err(Error::Data {
                path: source.to_string(),
                row: 0,
                message: format!("duplicate date {d0}"),
            });
        }
        let gap = month_index(d1) - month_index(d0);
        if gap != step {
            return Err(Error::Data {
                path: source.to_string(),
                row: 0,
                message: format!(
                    "dates {d0} and {d1} are {gap} month(s) apart; {frequency} data requires exactly {step}"
                ),
            });
        }
    }
    let start = rows[0].0;
    let values = rows.into_iter().map(|(_, close)| close).collect();
    PriceSeries::new(ticker, start, frequency, values)
}

/// Load one ticker's price history from a CSV file.
pub fn load_csv(path: &Path, ticker: &str, frequency: Frequency) -> Result<PriceSeries> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    parse_price_csv(&text, ticker, frequency, &path.display().to_string())
}

/// Write a series in the corpus CSV schema (used by the synthetic
/// generators and round-trip tests).
pub fn write_csv(series: &PriceSeries, path: &Path) -> Result<()> {
    let mut out = String::from("date,close\n");
    for (date, value) in series.dates().zip(series.values()) {
        out.push_str(&format!("{date},{value}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Load every series in a manifest, dropping those shorter than
/// `min_length`. Paths resolve relative to `base_dir` (normally the
/// manifest's directory).
pub fn load_corpus(
    manifest: &CorpusManifest,
    base_dir: &Path,
) -> Result<(Vec<PriceSeries>, CorpusStats, Vec<DropRecord>)> {
    let mut retained = Vec::new();
    let mut drops = Vec::new();
    for (ticker, rel_path) in &manifest.series {
        let path = base_dir.join(rel_path);
        let series = load_csv(&path, ticker, manifest.frequency)?;
        if series.len() < manifest.min_length {
            drops.push(DropRecord {
                ticker: ticker.clone(),
                reason: "shorter than min_length".into(),
                length: series.len(),
                min_length: manifest.min_length,
            });
        } else {
            retained.push(series);
        }
    }
    if retained.is_empty() {
        return Err(Error::Corpus(format!(
            "no series meet min_length {} ({} dropped)",
            manifest.min_length,
            drops.len()
        )));
    }
    let stats = compute_stats(&retained, manifest.frequency);
    Ok((retained, stats, drops))
}

fn compute_stats(series: &[PriceSeries], frequency: Frequency) -> CorpusStats {
    let mut histogram = BTreeMap::new();
    let mut min_len = usize::MAX;
    let mut max_len = 0;
    for s in series {
        min_len = min_len.min(s.len());
        max_len = max_len.max(s.len());
        let years = s.len() as u32 / frequency.periods_per_year();
        *histogram.entry(years).or_insert(0) += 1;
    }
    CorpusStats {
        n_series: series.len(),
        min_len,
        max_len,
        length_histogram: histogram,
    }
}

//! Observation frequencies and uniform-grid date arithmetic.
//!
//! Series live on a month grid: a quarterly step is exactly 3 months, a
//! monthly step exactly 1. The day-of-month is kept for display and for
//! temporal splits, but grid spacing is judged on (year, month) alone, so
//! quarter-end dates like 03-31 and 06-30 count as one quarterly step.

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

/// Sampling frequency of a price series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Quarterly,
    Monthly,
}

impl Frequency {
    /// Grid step in months.
    pub fn months_per_step(self) -> u32 {
        match self {
            Frequency::Quarterly => 3,
            Frequency::Monthly => 1,
        }
    }

    /// Observations per calendar year.
    pub fn periods_per_year(self) -> u32 {
        match self {
            Frequency::Quarterly => 4,
            Frequency::Monthly => 12,
        }
    }

    /// Grid step in year units (0.25 quarterly, 1/12 monthly).
    pub fn delta_t(self) -> f64 {
        f64::from(self.months_per_step()) / 12.0
    }
}

impl std::fmt::Display for Frequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Frequency::Quarterly => write!(f, "quarterly"),
            Frequency::Monthly => write!(f, "monthly"),
        }
    }
}

/// Index of a date's month on the grid: year * 12 + (month - 1).
pub fn month_index(date: NaiveDate) -> i64 {
    i64::from(date.year()) * 12 + i64::from(date.month0())
}

/// Advance a date by `steps` grid steps. Day-of-month is clamped by the
/// target month (Jan 31 + 1 month = Feb 28/29), matching exchange
/// end-of-period conventions.
pub fn advance(date: NaiveDate, frequency: Frequency, steps: usize) -> NaiveDate {
    let months = frequency.months_per_step() * steps as u32;
    date.checked_add_months(Months::new(months))
        .expect("date arithmetic overflow")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn month_index_is_monotone_on_quarter_ends() {
        let a = month_index(d("2015-03-31"));
        let b = month_index(d("2015-06-30"));
        assert_eq!(b - a, 3);
    }

    #[test]
    fn advance_clamps_day() {
        assert_eq!(advance(d("2015-01-31"), Frequency::Monthly, 1), d("2015-02-28"));
        assert_eq!(advance(d("2015-03-31"), Frequency::Quarterly, 2), d("2015-09-30"));
    }

    #[test]
    fn delta_t_values() {
        assert_eq!(Frequency::Quarterly.delta_t(), 0.25);
        assert!((Frequency::Monthly.delta_t() - 1.0 / 12.0).abs() < 1e-15);
    }
}

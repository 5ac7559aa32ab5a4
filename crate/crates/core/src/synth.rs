//! Seeded synthetic price generators.
//!
//! Log-price paths are built from Gaussian return innovations and
//! exponentiated, so prices are strictly positive by construction. The
//! random-walk generator is the null model for the relevance test; the
//! autoregressive generators provide the alternative for power experiments.

use crate::date::Frequency;
use crate::error::{Error, Result};
use crate::rng::Rng64;
use crate::series::PriceSeries;
use chrono::NaiveDate;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Return process driving a synthetic log-price path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// iid increments: r_t = sigma * eps_t.
    RandomWalk { sigma: f64 },
    /// AR(1) returns: r_t = phi * r_{t-1} + sigma * eps_t, zero pre-history.
    Ar1Returns { phi: f64, sigma: f64 },
    /// AR(p) returns with zero pre-history.
    ArpReturns { coefficients: Vec<f64>, sigma: f64 },
}

fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(1980, 1, 31).unwrap()
}

fn default_frequency() -> Frequency {
    Frequency::Monthly
}

/// Full description of one synthetic series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    /// Number of price observations (returns generated: length - 1).
    pub length: usize,
    pub initial_log_price: f64,
    pub seed: u64,
    #[serde(default = "default_start_date")]
    pub start_date: NaiveDate,
    #[serde(default = "default_frequency")]
    pub frequency: Frequency,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let sigma = match &self.kind {
            GeneratorKind::RandomWalk { sigma } => *sigma,
            GeneratorKind::Ar1Returns { phi, sigma } => {
                if phi.abs() >= 1.0 {
                    return Err(Error::Argument(format!(
                        "ar1 phi must satisfy |phi| < 1, got {phi}"
                    )));
                }
                *sigma
            }
            GeneratorKind::ArpReturns {
                coefficients,
                sigma,
            } => {
                if coefficients.is_empty() {
                    return Err(Error::Argument("AR(p) needs at least one coefficient".into()));
                }
                let radius = companion_spectral_radius(coefficients);
                if !(radius < 1.0) {
                    return Err(Error::Argument(format!(
                        "AR coefficients are outside the stationarity region \
                         (companion spectral radius {radius:.6})"
                    )));
                }
                *sigma
            }
        };
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Argument(format!("sigma must be positive, got {sigma}")));
        }
        if self.length < 2 {
            return Err(Error::Argument("length must be at least 2".into()));
        }
        Ok(())
    }
}

/// Spectral radius of the AR(p) companion matrix, i.e. the largest modulus
/// among the roots of z^p - c_1 z^{p-1} - ... - c_p, found by Durand-Kerner
/// iteration on the characteristic polynomial.
pub fn companion_spectral_radius(coefficients: &[f64]) -> f64 {
    let p = coefficients.len();
    if p == 1 {
        return coefficients[0].abs();
    }
    // Monic characteristic polynomial coefficients: z^p + a_1 z^{p-1} + ... + a_p
    // with a_k = -c_k.
    let a: Vec<Complex64> = coefficients
        .iter()
        .map(|&c| Complex64::new(-c, 0.0))
        .collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(1.0, 0.0);
        for &ak in &a {
            acc = acc * z + ak;
        }
        acc
    };
    // Standard non-real starting points spread on a circle.
    let mut roots: Vec<Complex64> = (0..p)
        .map(|k| Complex64::new(0.4, 0.9).powu(k as u32 + 1))
        .collect();
    for _ in 0..200 {
        let mut max_move: f64 = 0.0;
        for i in 0..p {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..p {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            max_move = max_move.max(delta.norm());
        }
        if max_move < 1e-13 {
            break;
        }
    }
    roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// Generate the return sequence for a spec (length - 1 values).
pub fn generate_returns(spec: &GeneratorSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.length - 1;
    let mut rng = Rng64::new(spec.seed);
    let returns = match &spec.kind {
        GeneratorKind::RandomWalk { sigma } => (0..n).map(|_| sigma * rng.normal()).collect(),
        GeneratorKind::Ar1Returns { phi, sigma } => {
            let mut prev = 0.0;
            (0..n)
                .map(|_| {
                    let r = phi * prev + sigma * rng.normal();
                    prev = r;
                    r
                })
                .collect()
        }
        GeneratorKind::ArpReturns {
            coefficients,
            sigma,
        } => {
            let mut history: Vec<f64> = vec![0.0; coefficients.len()];
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let mut r = sigma * rng.normal();
                for (c, past) in coefficients.iter().zip(history.iter()) {
                    r += c * past;
                }
                history.rotate_right(1);
                history[0] = r;
                out.push(r);
            }
            out
        }
    };
    Ok(returns)
}

/// Generate a synthetic price series: log price is the cumulative sum of
/// returns from `initial_log_price`, prices its exponent.
pub fn generate(spec: &GeneratorSpec) -> Result<PriceSeries> {
    let returns = generate_returns(spec)?;
    let mut log_price = spec.initial_log_price;
    let mut values = Vec::with_capacity(spec.length);
    values.push(log_price.exp());
    for r in returns {
        log_price += r;
        values.push(log_price.exp());
    }
    PriceSeries::new(
        format!("SYN{:08x}", spec.seed as u32),
        spec.start_date,
        spec.frequency,
        values,
    )
}

/// Generate with an explicit ticker.
pub fn generate_named(spec: &GeneratorSpec, ticker: &str) -> Result<PriceSeries> {
    let series = generate(spec)?;
    PriceSeries::new(ticker, series.start(), series.frequency(), series.values().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: GeneratorKind, length: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            kind,
            length,
            initial_log_price: 4.6,
            seed,
            start_date: default_start_date(),
            frequency: Frequency::Monthly,
        }
    }

    #[test]
    fn phi_zero_reduces_to_the_random_walk_path() {
        let walk = generate(&spec(GeneratorKind::RandomWalk { sigma: 0.05 }, 200, 9)).unwrap();
        let ar = generate(&spec(
            GeneratorKind::Ar1Returns {
                phi: 0.0,
                sigma: 0.05,
            },
            200,
            9,
        ))
        .unwrap();
        assert_eq!(walk.values(), ar.values());
    }

    #[test]
    fn same_seed_reproduces_the_series() {
        let s = spec(GeneratorKind::Ar1Returns { phi: 0.3, sigma: 0.1 }, 100, 77);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
    }

    #[test]
    fn ar1_lag1_autocorrelation_matches_population_value() {
        let s = spec(
            GeneratorKind::Ar1Returns {
                phi: 0.6,
                sigma: 0.05,
            },
            10_001,
            123,
        );
        let returns = generate_returns(&s).unwrap();
        let mean = returns.iter().sum::<f64>() / returns.len() as f64;
        let var: f64 = returns.iter().map(|r| (r - mean) * (r - mean)).sum();
        let cov: f64 = returns
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum();
        let rho = cov / var;
        assert!((rho - 0.6).abs() < 0.05, "sample autocorrelation {rho}");
    }

    #[test]
    fn prices_are_strictly_positive() {
        for seed in 0..20 {
            let s = spec(GeneratorKind::RandomWalk { sigma: 0.3 }, 500, seed);
            let series = generate(&s).unwrap();
            assert!(series.values().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn random_walk_increment_means_concentrate() {
        // Mean of 10k iid increments should sit within 4 sigma / sqrt(n) of
        // zero for at least 95% of seeds.
        let sigma = 0.05;
        let n = 10_000;
        let bound = 4.0 * sigma / (n as f64).sqrt();
        let mut hits = 0;
        let seeds = 40;
        for seed in 0..seeds {
            let s = spec(GeneratorKind::RandomWalk { sigma }, n + 1, 1000 + seed);
            let returns = generate_returns(&s).unwrap();
            let mean = returns.iter().sum::<f64>() / returns.len() as f64;
            if mean.abs() <= bound {
                hits += 1;
            }
        }
        assert!(hits * 100 >= seeds * 95, "{hits}/{seeds} within bound");
    }

    #[test]
    fn invalid_coefficients_are_rejected() {
        assert!(spec(GeneratorKind::Ar1Returns { phi: 1.0, sigma: 0.1 }, 10, 0)
            .validate()
            .is_err());
        // Explosive AR(2).
        assert!(spec(
            GeneratorKind::ArpReturns {
                coefficients: vec![0.9, 0.3],
                sigma: 0.1
            },
            10,
            0
        )
        .validate()
        .is_err());
        // Stationary AR(3) used by the grid sanity experiment.
        assert!(spec(
            GeneratorKind::ArpReturns {
                coefficients: vec![0.05, 0.15, 0.5],
                sigma: 0.1
            },
            10,
            0
        )
        .validate()
        .is_ok());
        assert!(spec(GeneratorKind::RandomWalk { sigma: 0.0 }, 10, 0)
            .validate()
            .is_err());
    }

    #[test]
    fn spectral_radius_matches_known_cases() {
        // AR(1): radius is |phi|.
        assert!((companion_spectral_radius(&[0.6]) - 0.6).abs() < 1e-12);
        // AR(2) with roots 0.5 and 0.3: z^2 - 0.8 z + 0.15, so
        // coefficients (0.8, -0.15).
        let r = companion_spectral_radius(&[0.8, -0.15]);
        assert!((r - 0.5).abs() < 1e-8, "radius {r}");
        // Complex pair: z^2 - z + 0.5 has |root| = sqrt(0.5).
        let r = companion_spectral_radius(&[1.0, -0.5]);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-8, "radius {r}");
    }

    #[test]
    fn generator_spec_json_round_trip() {
        let s = spec(
            GeneratorKind::ArpReturns {
                coefficients: vec![0.1, 0.2],
                sigma: 0.05,
            },
            64,
            5,
        );
        let json = serde_json::to_string(&s).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}

//! Forecasting equity prices from their own history with small feedforward
//! and recurrent networks, and testing whether lagged price changes are
//! relevant predictors at all.
//!
//! The pipeline: load per-ticker closing prices from CSV ([`ingest`]),
//! transform and reshape them into padded panels or stacked lag windows
//! ([`series`]), train from-scratch MLP / RNN / LSTM / GRU models with Adam
//! ([`neural`], [`optim`]), and run a bootstrap test on the fitted network's
//! input gradients with a Bonferroni joint bound ([`relevance`]). Seeded
//! synthetic generators ([`synth`]) supply ground truth for size and power
//! experiments.
//!
//! All numerics are f64 and all randomness flows from explicit seeds;
//! pipelines are bit-reproducible within one build.

pub mod date;
pub mod error;
pub mod ingest;
pub mod neural;
pub mod optim;
pub mod relevance;
pub mod rng;
pub mod series;
pub mod synth;
pub mod training;

pub use date::Frequency;
pub use error::{Error, Result};
pub use series::{PriceSeries, Transform};

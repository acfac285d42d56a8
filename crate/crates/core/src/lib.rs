//! Goodness-of-fit testing for the one-sided Lévy distribution.
//!
//! The crate provides the Lévy law (CDF, density, quantile, samplers), a set
//! of alternative families, quantile conditional moments with closed forms,
//! four scale estimators, six scale-free test statistics and a Monte Carlo
//! engine for null calibration, p-values and power.

pub mod condmoments;
pub mod data;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod statistics;

pub use condmoments::{QuantileSplit, Sample};
pub use distributions::{Alternative, LevyParams, LevySampler};
pub use error::{Error, Result};
pub use estimators::{EstimatorKind, ScaleEstimate};
pub use rng::RandomStream;
pub use statistics::{Statistic, StatisticKind, StatisticSpec};

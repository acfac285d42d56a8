//! Goodness-of-fit statistics for the one-sided Lévy law.
//!
//! Each statistic is scale-free: it is unchanged when every observation is
//! multiplied by the same positive constant. `C_n` is also unchanged by a
//! common shift.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::condmoments::{QuantileSplit, Sample};
use crate::error::{Error, Result};
use crate::estimators::{QcmEstimator, QcvEstimator, TransformedSample, MIN_POSITIVE_OBSERVATION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticKind {
    Vn,
    On,
    Tn,
    Cn,
    Ran,
    DeltaN,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 6] = [
        StatisticKind::Vn,
        StatisticKind::On,
        StatisticKind::Tn,
        StatisticKind::Cn,
        StatisticKind::Ran,
        StatisticKind::DeltaN,
    ];

    /// The five statistics for a fixed (zero) location.
    pub const FIXED_LOCATION: [StatisticKind; 5] = [
        StatisticKind::Vn,
        StatisticKind::Tn,
        StatisticKind::On,
        StatisticKind::DeltaN,
        StatisticKind::Ran,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Vn => "vn",
            Self::On => "on",
            Self::Tn => "tn",
            Self::Cn => "cn",
            Self::Ran => "ran",
            Self::DeltaN => "deltan",
        }
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "vn" | "v" => Ok(Self::Vn),
            "on" | "o" => Ok(Self::On),
            "tn" | "t" => Ok(Self::Tn),
            "cn" | "c" => Ok(Self::Cn),
            "ran" | "r" | "r02n" => Ok(Self::Ran),
            "deltan" | "delta" | "dn" => Ok(Self::DeltaN),
            _ => Err(Error::domain(format!("unknown statistic '{s}'"))),
        }
    }
}

/// A statistic together with its tuning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StatisticSpec {
    Vn,
    On {
        first: QuantileSplit,
        second: QuantileSplit,
    },
    Tn {
        split: QuantileSplit,
    },
    Cn {
        first: QuantileSplit,
        second: QuantileSplit,
    },
    Ran {
        a: f64,
    },
    DeltaN,
}

pub const ON_DEFAULT_SPLITS: (QuantileSplit, QuantileSplit) = (
    QuantileSplit { a: 0.0, b: 0.3 },
    QuantileSplit { a: 0.8, b: 0.95 },
);
pub const TN_DEFAULT_SPLIT: QuantileSplit = QuantileSplit { a: 0.02, b: 0.48 };
pub const CN_DEFAULT_SPLITS: (QuantileSplit, QuantileSplit) = (
    QuantileSplit { a: 0.0, b: 0.4 },
    QuantileSplit { a: 0.8, b: 0.95 },
);
pub const RAN_DEFAULT_TUNING: f64 = 0.2;

impl StatisticSpec {
    pub fn default_for(kind: StatisticKind) -> Self {
        match kind {
            StatisticKind::Vn => Self::Vn,
            StatisticKind::On => Self::On {
                first: ON_DEFAULT_SPLITS.0,
                second: ON_DEFAULT_SPLITS.1,
            },
            StatisticKind::Tn => Self::Tn {
                split: TN_DEFAULT_SPLIT,
            },
            StatisticKind::Cn => Self::Cn {
                first: CN_DEFAULT_SPLITS.0,
                second: CN_DEFAULT_SPLITS.1,
            },
            StatisticKind::Ran => Self::Ran {
                a: RAN_DEFAULT_TUNING,
            },
            StatisticKind::DeltaN => Self::DeltaN,
        }
    }

    pub fn kind(&self) -> StatisticKind {
        match self {
            Self::Vn => StatisticKind::Vn,
            Self::On { .. } => StatisticKind::On,
            Self::Tn { .. } => StatisticKind::Tn,
            Self::Cn { .. } => StatisticKind::Cn,
            Self::Ran { .. } => StatisticKind::Ran,
            Self::DeltaN => StatisticKind::DeltaN,
        }
    }

    /// Replace the splits of a windowed statistic. `second` is ignored by
    /// `T_n`; statistics without windows are returned unchanged.
    pub fn with_splits(self, first: Option<QuantileSplit>, second: Option<QuantileSplit>) -> Self {
        match self {
            Self::On {
                first: f,
                second: s,
            } => Self::On {
                first: first.unwrap_or(f),
                second: second.unwrap_or(s),
            },
            Self::Cn {
                first: f,
                second: s,
            } => Self::Cn {
                first: first.unwrap_or(f),
                second: second.unwrap_or(s),
            },
            Self::Tn { split } => Self::Tn {
                split: first.unwrap_or(split),
            },
            other => other,
        }
    }

    pub fn prepare(&self) -> Result<Statistic> {
        Statistic::new(*self)
    }
}

impl From<StatisticKind> for StatisticSpec {
    fn from(kind: StatisticKind) -> Self {
        Self::default_for(kind)
    }
}

#[derive(Debug, Clone, Copy)]
enum Prepared {
    Vn,
    On(QcmEstimator, QcmEstimator),
    Tn(QcmEstimator),
    Cn(QcvEstimator, QcvEstimator),
    Ran(f64),
    DeltaN,
}

/// A statistic ready for repeated evaluation; normalising constants are
/// computed once.
#[derive(Debug, Clone, Copy)]
pub struct Statistic {
    spec: StatisticSpec,
    prepared: Prepared,
}

impl Statistic {
    pub fn new(spec: StatisticSpec) -> Result<Self> {
        let prepared = match spec {
            StatisticSpec::Vn => Prepared::Vn,
            StatisticSpec::On { first, second } => {
                Prepared::On(QcmEstimator::new(first)?, QcmEstimator::new(second)?)
            }
            StatisticSpec::Tn { split } => Prepared::Tn(QcmEstimator::new(split)?),
            StatisticSpec::Cn { first, second } => {
                Prepared::Cn(QcvEstimator::new(first)?, QcvEstimator::new(second)?)
            }
            StatisticSpec::Ran { a } => {
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::domain(format!(
                        "R statistic tuning constant must be positive, got {a}"
                    )));
                }
                Prepared::Ran(a)
            }
            StatisticSpec::DeltaN => Prepared::DeltaN,
        };
        Ok(Self { spec, prepared })
    }

    pub fn spec(&self) -> &StatisticSpec {
        &self.spec
    }

    pub fn kind(&self) -> StatisticKind {
        self.spec.kind()
    }

    /// Smallest sample size on which the statistic is defined.
    pub fn min_sample_size(&self) -> usize {
        match self.spec {
            StatisticSpec::On { first, second } => {
                first.min_sample_size(1).max(second.min_sample_size(1))
            }
            StatisticSpec::Tn { split } => split.min_sample_size(1).max(2),
            StatisticSpec::Cn { first, second } => {
                first.min_sample_size(2).max(second.min_sample_size(2))
            }
            _ => 2,
        }
    }

    pub fn evaluate(&self, s: &Sample) -> Result<f64> {
        let root_n = (s.len() as f64).sqrt();
        match &self.prepared {
            Prepared::Vn => {
                require_positive(s)?;
                let t = TransformedSample::new(s)?;
                Ok(root_n * (t.cov()? / t.mle() - 1.0))
            }
            Prepared::On(first, second) => {
                require_positive(s)?;
                Ok(root_n * (first.estimate(s)? / second.estimate(s)? - 1.0))
            }
            Prepared::Tn(qcm) => {
                require_positive(s)?;
                let t = TransformedSample::new(s)?;
                let cov = t.cov()?;
                let q = qcm.estimate(s)?;
                Ok(root_n * ((cov + q) / (2.0 * t.mle()) - 1.0))
            }
            Prepared::Cn(first, second) => {
                Ok(root_n * (first.estimate(s)? / second.estimate(s)? - 1.0))
            }
            Prepared::Ran(a) => r_statistic(s, *a),
            Prepared::DeltaN => delta_statistic(s),
        }
    }
}

fn require_positive(s: &Sample) -> Result<()> {
    if s.len() < 2 {
        return Err(Error::domain("statistic needs at least 2 observations"));
    }
    if s.min() < MIN_POSITIVE_OBSERVATION {
        return Err(Error::domain(format!(
            "statistic needs positive observations, smallest is {}",
            s.min()
        )));
    }
    Ok(())
}

/// `V_n = √n (ĉ_COV / ĉ_MLE - 1)`.
pub fn stat_vn(s: &Sample) -> Result<f64> {
    Statistic::new(StatisticSpec::Vn)?.evaluate(s)
}

/// `O_n = √n (ĉ_QCM(first) / ĉ_QCM(second) - 1)`.
pub fn stat_on(s: &Sample, first: QuantileSplit, second: QuantileSplit) -> Result<f64> {
    Statistic::new(StatisticSpec::On { first, second })?.evaluate(s)
}

/// `T_n = √n ((ĉ_COV + ĉ_QCM(split)) / (2 ĉ_MLE) - 1)`.
pub fn stat_tn(s: &Sample, split: QuantileSplit) -> Result<f64> {
    Statistic::new(StatisticSpec::Tn { split })?.evaluate(s)
}

/// `C_n = √n (ĉ_QCV(first) / ĉ_QCV(second) - 1)`.
pub fn stat_cn(s: &Sample, first: QuantileSplit, second: QuantileSplit) -> Result<f64> {
    Statistic::new(StatisticSpec::Cn { first, second })?.evaluate(s)
}

pub fn stat_ran(s: &Sample, a: f64) -> Result<f64> {
    Statistic::new(StatisticSpec::Ran { a })?.evaluate(s)
}

pub fn stat_deltan(s: &Sample) -> Result<f64> {
    Statistic::new(StatisticSpec::DeltaN)?.evaluate(s)
}

#[inline]
fn pow_neg_five_halves(t: f64) -> f64 {
    1.0 / (t * t * t.sqrt())
}

/// Laplace-transform type statistic on `S = X / ĉ_MLE`:
///
/// `(3√π / 4n²) Σ_{i,j} [ (a + (S_i+S_j)/4)^(-5/2) - ½(a+S_i)^(-5/2) - ½(a+S_j)^(-5/2) ]`,
/// diagonal included.
fn r_statistic(s: &Sample, a: f64) -> Result<f64> {
    require_positive(s)?;
    let mle = TransformedSample::new(s)?.mle();
    let scaled: Vec<f64> = s.values().iter().map(|x| x / mle).collect();
    let n = scaled.len();
    let marginal: f64 = scaled.iter().map(|&y| pow_neg_five_halves(a + y)).sum();
    let mut off_diagonal = 0.0;
    let mut diagonal = 0.0;
    for (i, &yi) in scaled.iter().enumerate() {
        diagonal += pow_neg_five_halves(a + 0.5 * yi);
        let row: f64 = scaled[i + 1..]
            .iter()
            .map(|&yj| pow_neg_five_halves(a + 0.25 * (yi + yj)))
            .sum();
        off_diagonal += row;
    }
    let pair_sum = 2.0 * off_diagonal + diagonal;
    // Each marginal term appears n times in each of the two single-index sums.
    let total = pair_sum - n as f64 * marginal;
    Ok(3.0 * std::f64::consts::PI.sqrt() / (4.0 * (n * n) as f64) * total)
}

/// Stein-type statistic `(3/2) Û₁ - (ĉ_MLE/2) Û₂ - 1/2`, where `Û₁`, `Û₂` are
/// U-statistics over ordered pairs `i ≠ j` with kernels `min(X_i,X_j)/X_i`
/// and `min(X_i,X_j)/X_i²`.
fn delta_statistic(s: &Sample) -> Result<f64> {
    require_positive(s)?;
    let mle = TransformedSample::new(s)?.mle();
    let (u1, u2) = min_kernel_u_statistics(s.sorted());
    Ok(1.5 * u1 - 0.5 * mle * u2 - 0.5)
}

/// `Û₁`, `Û₂` from sorted observations in O(n): for `x_(k)` the sum of
/// `min(x_(k), x_j)` over `j ≠ k` is the prefix sum below `k` plus
/// `(n-1-k)·x_(k)`.
pub(crate) fn min_kernel_u_statistics(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len();
    let mut prefix = 0.0;
    let mut u1 = 0.0;
    let mut u2 = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        let min_sum = prefix + (n - 1 - k) as f64 * x;
        u1 += min_sum / x;
        u2 += min_sum / (x * x);
        prefix += x;
    }
    let pairs = (n * (n - 1)) as f64;
    (u1 / pairs, u2 / pairs)
}

//! Scale estimators for `Lv(c)`.

use serde::{Deserialize, Serialize};

use crate::condmoments::{
    sample_qcm, sample_qcv, theoretical_qcm, theoretical_qcv, QuantileSplit, Sample,
};
use crate::error::{Error, Result};

/// Smallest observation accepted before taking reciprocals.
pub const MIN_POSITIVE_OBSERVATION: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Qcm,
    Qcv,
    Mle,
    Cov,
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qcm" => Ok(Self::Qcm),
            "qcv" => Ok(Self::Qcv),
            "mle" => Ok(Self::Mle),
            "cov" => Ok(Self::Cov),
            _ => Err(Error::domain(format!("unknown estimator '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleEstimate {
    pub method: EstimatorKind,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<QuantileSplit>,
}

/// Reciprocals `W = 1/X` and their logarithms `Z = ln W`.
#[derive(Debug, Clone)]
pub struct TransformedSample {
    pub inverse_values: Vec<f64>,
    pub log_inverse_values: Vec<f64>,
    pub inverse_mean: f64,
    pub log_inverse_mean: f64,
}

impl TransformedSample {
    pub fn new(s: &Sample) -> Result<Self> {
        if let Some((i, x)) = s
            .values()
            .iter()
            .enumerate()
            .find(|(_, &x)| x < MIN_POSITIVE_OBSERVATION)
        {
            return Err(Error::domain(format!(
                "reciprocal transform needs positive observations, observation {} is {x}",
                i + 1
            )));
        }
        let n = s.len() as f64;
        let inverse_values: Vec<f64> = s.values().iter().map(|x| 1.0 / x).collect();
        let log_inverse_values: Vec<f64> = inverse_values.iter().map(|w| w.ln()).collect();
        let inverse_mean = inverse_values.iter().sum::<f64>() / n;
        let log_inverse_mean = log_inverse_values.iter().sum::<f64>() / n;
        Ok(Self {
            inverse_values,
            log_inverse_values,
            inverse_mean,
            log_inverse_mean,
        })
    }

    /// `Σ (W_i - W̄)(Z_i - Z̄)`.
    pub fn cross_product_sum(&self) -> f64 {
        self.inverse_values
            .iter()
            .zip(&self.log_inverse_values)
            .map(|(w, z)| (w - self.inverse_mean) * (z - self.log_inverse_mean))
            .sum()
    }

    pub fn mle(&self) -> f64 {
        1.0 / self.inverse_mean
    }

    pub fn cov(&self) -> Result<f64> {
        let n = self.inverse_values.len();
        if n < 2 {
            return Err(Error::domain("covariance estimator needs n >= 2"));
        }
        let denom = self.cross_product_sum();
        if denom.is_nan() || denom <= 0.0 {
            return Err(Error::estimation(format!(
                "covariance of inverse and log-inverse observations is not positive ({denom:e})"
            )));
        }
        Ok(2.0 * n as f64 / denom)
    }
}

/// QCM scale estimator with its `Lv(1)` normalising constant precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcmEstimator {
    split: QuantileSplit,
    unit_mean: f64,
}

impl QcmEstimator {
    pub fn new(split: QuantileSplit) -> Result<Self> {
        Ok(Self {
            split,
            unit_mean: theoretical_qcm(&split, 1.0)?,
        })
    }

    pub fn split(&self) -> QuantileSplit {
        self.split
    }

    pub fn estimate(&self, s: &Sample) -> Result<f64> {
        let m = sample_qcm(s, &self.split)?;
        if m.is_nan() || m <= 0.0 {
            return Err(Error::estimation(format!(
                "windowed mean on {} is not positive ({m})",
                self.split
            )));
        }
        Ok(m / self.unit_mean)
    }
}

/// QCV scale estimator with its `Lv(1)` normalising constant precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcvEstimator {
    split: QuantileSplit,
    unit_variance: f64,
}

impl QcvEstimator {
    pub fn new(split: QuantileSplit) -> Result<Self> {
        Ok(Self {
            split,
            unit_variance: theoretical_qcv(&split, 1.0)?,
        })
    }

    pub fn split(&self) -> QuantileSplit {
        self.split
    }

    pub fn estimate(&self, s: &Sample) -> Result<f64> {
        let v = sample_qcv(s, &self.split)?;
        if v.is_nan() || v <= 0.0 {
            return Err(Error::estimation(format!(
                "windowed variance on {} is zero",
                self.split
            )));
        }
        Ok((v / self.unit_variance).sqrt())
    }
}

pub fn estimate_qcm(s: &Sample, split: &QuantileSplit) -> Result<ScaleEstimate> {
    Ok(ScaleEstimate {
        method: EstimatorKind::Qcm,
        value: QcmEstimator::new(*split)?.estimate(s)?,
        split: Some(*split),
    })
}

pub fn estimate_qcv(s: &Sample, split: &QuantileSplit) -> Result<ScaleEstimate> {
    Ok(ScaleEstimate {
        method: EstimatorKind::Qcv,
        value: QcvEstimator::new(*split)?.estimate(s)?,
        split: Some(*split),
    })
}

/// `1 / mean(1/X)`.
pub fn estimate_mle(s: &Sample) -> Result<ScaleEstimate> {
    Ok(ScaleEstimate {
        method: EstimatorKind::Mle,
        value: TransformedSample::new(s)?.mle(),
        split: None,
    })
}

/// `2n / Σ (W_i - W̄)(Z_i - Z̄)` with `W = 1/X`, `Z = ln W`.
pub fn estimate_cov(s: &Sample) -> Result<ScaleEstimate> {
    Ok(ScaleEstimate {
        method: EstimatorKind::Cov,
        value: TransformedSample::new(s)?.cov()?,
        split: None,
    })
}

/// Dispatch on the estimator kind; `split` is required for QCM and QCV.
pub fn estimate(
    kind: EstimatorKind,
    s: &Sample,
    split: Option<&QuantileSplit>,
) -> Result<ScaleEstimate> {
    let need_split =
        || split.ok_or_else(|| Error::domain(format!("{kind:?} estimator needs a quantile split")));
    match kind {
        EstimatorKind::Qcm => estimate_qcm(s, need_split()?),
        EstimatorKind::Qcv => estimate_qcv(s, need_split()?),
        EstimatorKind::Mle => estimate_mle(s),
        EstimatorKind::Cov => estimate_cov(s),
    }
}

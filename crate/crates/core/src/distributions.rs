//! The one-sided Lévy law and the alternative families used in power studies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::special::{normal_quantile_unchecked, normal_sf};

/// Location `mu` and scale `c` of the one-sided Lévy law `Lv(mu, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyParams {
    pub mu: f64,
    pub c: f64,
}

impl LevyParams {
    pub fn new(mu: f64, c: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain(format!("location must be finite, got {mu}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!(
                "scale must be finite and positive, got {c}"
            )));
        }
        Ok(Self { mu, c })
    }

    /// `Lv(c)` with zero location.
    pub fn scale(c: f64) -> Result<Self> {
        Self::new(0.0, c)
    }

    /// The standard law `Lv(1)`.
    pub fn standard() -> Self {
        Self { mu: 0.0, c: 1.0 }
    }
}

impl Default for LevyParams {
    fn default() -> Self {
        Self::standard()
    }
}

/// CDF: `2 - 2Φ(√(c/(x-mu)))` above the location, zero at or below it.
pub fn levy_cdf(x: f64, p: &LevyParams) -> f64 {
    let t = x - p.mu;
    if t <= 0.0 || t.is_nan() {
        return 0.0;
    }
    2.0 * normal_sf((p.c / t).sqrt())
}

pub fn levy_pdf(x: f64, p: &LevyParams) -> f64 {
    let t = x - p.mu;
    if t <= 0.0 || t.is_nan() {
        return 0.0;
    }
    (p.c / (2.0 * PI)).sqrt() * t.powf(-1.5) * (-p.c / (2.0 * t)).exp()
}

/// Quantile `mu + c / Φ⁻¹(1 - prob/2)²` for `0 < prob < 1`.
pub fn levy_quantile(prob: f64, p: &LevyParams) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain(format!(
            "Lévy quantile requires 0 < prob < 1, got {prob}"
        )));
    }
    Ok(levy_quantile_unchecked(prob, p))
}

pub(crate) fn levy_quantile_unchecked(prob: f64, p: &LevyParams) -> f64 {
    // Φ⁻¹(1 - prob/2) = -Φ⁻¹(prob/2); the lower-tail form keeps full precision
    // for small prob.
    let z = normal_quantile_unchecked(0.5 * prob);
    p.mu + p.c / (z * z)
}

/// How Lévy variates are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LevySampler {
    /// `mu + c / Z²` with `Z` standard normal.
    #[default]
    NormalTransform,
    /// `levy_quantile(U)` with `U` uniform on (0, 1).
    Inversion,
}

/// Draw `n` i.i.d. variates from `Lv(mu, c)` with the default sampler.
pub fn sample_levy(p: &LevyParams, n: usize, stream: &mut RandomStream) -> Result<Vec<f64>> {
    sample_levy_with(p, n, stream, LevySampler::NormalTransform)
}

pub fn sample_levy_with(
    p: &LevyParams,
    n: usize,
    stream: &mut RandomStream,
    method: LevySampler,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let p = LevyParams::new(p.mu, p.c)?;
    let draws = match method {
        LevySampler::NormalTransform => (0..n)
            .map(|_| {
                let z = stream.standard_normal();
                p.mu + p.c / (z * z)
            })
            .collect(),
        LevySampler::Inversion => (0..n)
            .map(|_| levy_quantile_unchecked(stream.uniform(), &p))
            .collect(),
    };
    Ok(draws)
}

/// An alternative-hypothesis family with its parameters.
///
/// Parameter names and order follow the conventional parametrisation of each
/// family; all supports lie in `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Alternative {
    Gamma {
        shape: f64,
        scale: f64,
    },
    ChiSquared {
        dof: f64,
    },
    Weibull {
        scale: f64,
        shape: f64,
    },
    /// `sigma2` is the variance of the underlying normal.
    Lognormal {
        mu: f64,
        sigma2: f64,
    },
    /// Written `Pareto(shape, scale)`; support `[scale, ∞)`.
    Pareto {
        shape: f64,
        scale: f64,
    },
    Rayleigh {
        sigma: f64,
    },
    HalfNormal {
        sigma: f64,
    },
    /// CDF `exp(-((x - location)/scale)^(-shape))` for `x > location`.
    Frechet {
        location: f64,
        scale: f64,
        shape: f64,
    },
    /// `|ln G|` with `G ~ Gamma(shape, scale)`.
    AbsLogGamma {
        shape: f64,
        scale: f64,
    },
    InvGaussian {
        mean: f64,
        shape: f64,
    },
    /// CDF `1 - (1 + (x/scale)^sigma)^(-eta)`.
    Burr {
        scale: f64,
        eta: f64,
        sigma: f64,
    },
}

impl Alternative {
    /// The twelve alternatives of the reference power study, in table order.
    pub fn reference_set() -> Vec<Alternative> {
        use Alternative::*;
        vec![
            Gamma {
                shape: 2.0,
                scale: 3.0,
            },
            ChiSquared { dof: 4.0 },
            Weibull {
                scale: 1.75,
                shape: 1.0,
            },
            Pareto {
                shape: 0.75,
                scale: 1.0,
            },
            Rayleigh { sigma: 1.0 },
            HalfNormal { sigma: 1.0 },
            AbsLogGamma {
                shape: 3.0,
                scale: 2.0,
            },
            Pareto {
                shape: 1.5,
                scale: 0.5,
            },
            InvGaussian {
                mean: 1.0,
                shape: 1.5,
            },
            Lognormal {
                mu: 0.0,
                sigma2: 1.0,
            },
            Frechet {
                location: 0.0,
                scale: 0.5,
                shape: 1.0,
            },
            Burr {
                scale: 1.5,
                eta: 0.5,
                sigma: 0.5,
            },
        ]
    }

    pub fn validate(&self) -> Result<()> {
        use Alternative::*;
        let positive: &[(&str, f64)] = match self {
            Gamma { shape, scale } | AbsLogGamma { shape, scale } => {
                &[("shape", *shape), ("scale", *scale)]
            }
            ChiSquared { dof } => &[("dof", *dof)],
            Weibull { scale, shape } | Pareto { scale, shape } => {
                &[("scale", *scale), ("shape", *shape)]
            }
            Lognormal { sigma2, .. } => &[("sigma2", *sigma2)],
            Rayleigh { sigma } | HalfNormal { sigma } => &[("sigma", *sigma)],
            Frechet { scale, shape, .. } => &[("scale", *scale), ("shape", *shape)],
            InvGaussian { mean, shape } => &[("mean", *mean), ("shape", *shape)],
            Burr { scale, eta, sigma } => &[("scale", *scale), ("eta", *eta), ("sigma", *sigma)],
        };
        for (name, v) in positive {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::domain(format!(
                    "{}: parameter {name} must be finite and positive, got {v}",
                    self.family_name()
                )));
            }
        }
        match self {
            Lognormal { mu, .. } if !mu.is_finite() => Err(Error::domain(format!(
                "lognormal: mu must be finite, got {mu}"
            ))),
            Frechet { location, .. } if !(location.is_finite() && *location >= 0.0) => {
                Err(Error::domain(format!(
                    "frechet: location must be finite and non-negative, got {location}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn family_name(&self) -> &'static str {
        use Alternative::*;
        match self {
            Gamma { .. } => "gamma",
            ChiSquared { .. } => "chisquared",
            Weibull { .. } => "weibull",
            Lognormal { .. } => "lognormal",
            Pareto { .. } => "pareto",
            Rayleigh { .. } => "rayleigh",
            HalfNormal { .. } => "halfnormal",
            Frechet { .. } => "frechet",
            AbsLogGamma { .. } => "abslog-gamma",
            InvGaussian { .. } => "invgaussian",
            Burr { .. } => "burr",
        }
    }

    /// Draw `n` i.i.d. variates.
    pub fn sample(&self, n: usize, stream: &mut RandomStream) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        self.validate()?;
        use Alternative::*;
        let out = match *self {
            Gamma { shape, scale } => {
                let g = gamma(shape, scale)?;
                (0..n).map(|_| g.sample(stream)).collect()
            }
            ChiSquared { dof } => {
                let g = gamma(0.5 * dof, 2.0)?;
                (0..n).map(|_| g.sample(stream)).collect()
            }
            Weibull { scale, shape } => (0..n)
                .map(|_| scale * (-stream.uniform().ln()).powf(1.0 / shape))
                .collect(),
            Lognormal { mu, sigma2 } => {
                let sigma = sigma2.sqrt();
                (0..n)
                    .map(|_| (mu + sigma * stream.standard_normal()).exp())
                    .collect()
            }
            Pareto { scale, shape } => (0..n)
                .map(|_| scale * stream.uniform().powf(-1.0 / shape))
                .collect(),
            Rayleigh { sigma } => (0..n)
                .map(|_| sigma * (-2.0 * stream.uniform().ln()).sqrt())
                .collect(),
            HalfNormal { sigma } => (0..n)
                .map(|_| sigma * stream.standard_normal().abs())
                .collect(),
            Frechet {
                location,
                scale,
                shape,
            } => (0..n)
                .map(|_| location + scale * (-stream.uniform().ln()).powf(-1.0 / shape))
                .collect(),
            AbsLogGamma { shape, scale } => {
                let g = gamma(shape, scale)?;
                (0..n).map(|_| g.sample(stream).ln().abs()).collect()
            }
            InvGaussian { mean, shape } => (0..n)
                .map(|_| inverse_gaussian(mean, shape, stream))
                .collect(),
            Burr { scale, eta, sigma } => (0..n)
                .map(|_| {
                    let u = stream.uniform();
                    scale * ((1.0 - u).powf(-1.0 / eta) - 1.0).powf(1.0 / sigma)
                })
                .collect(),
        };
        Ok(out)
    }
}

fn gamma(shape: f64, scale: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, scale).map_err(|e| Error::domain(format!("gamma({shape}, {scale}): {e}")))
}

// Michael, Schucany & Haas: one root of the chi-square transform, then a
// uniform choice between the two roots.
fn inverse_gaussian(mean: f64, shape: f64, stream: &mut RandomStream) -> f64 {
    let nu = stream.standard_normal();
    let y = nu * nu;
    let my = mean * y;
    let x = mean + mean * my / (2.0 * shape)
        - mean / (2.0 * shape) * (4.0 * shape * my + my * my).sqrt();
    if stream.uniform() <= mean / (mean + x) {
        x
    } else {
        mean * mean / x
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Alternative::*;
        match self {
            Gamma { shape, scale } => write!(f, "Gamma({shape},{scale})"),
            ChiSquared { dof } => write!(f, "Chi-Squared({dof})"),
            Weibull { scale, shape } => write!(f, "Weibull({scale},{shape})"),
            Lognormal { mu, sigma2 } => write!(f, "Lognormal({mu},{sigma2})"),
            Pareto { shape, scale } => write!(f, "Pareto({shape},{scale})"),
            Rayleigh { sigma } => write!(f, "Rayleigh({sigma})"),
            HalfNormal { sigma } => write!(f, "Half-normal({sigma})"),
            Frechet {
                location,
                scale,
                shape,
            } => write!(f, "Frechet({location},{scale},{shape})"),
            AbsLogGamma { shape, scale } => write!(f, "|Log-Gamma({shape},{scale})|"),
            InvGaussian { mean, shape } => write!(f, "Inv-Gaussian({mean},{shape})"),
            Burr { scale, eta, sigma } => write!(f, "Burr({scale},{eta},{sigma})"),
        }
    }
}

/// Parses `family:p1,p2,...`, e.g. `lognormal:0,1` or `halfnormal:1.0`.
///
/// Fréchet takes `location,scale,shape`.
impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let values = parse_params(params)?;
        let key: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let need = |k: usize| -> Result<()> {
            if values.len() == k {
                Ok(())
            } else {
                Err(Error::domain(format!(
                    "{name} takes {k} parameter(s), got {}",
                    values.len()
                )))
            }
        };
        use Alternative::*;
        let alt = match key.as_str() {
            "gamma" => {
                need(2)?;
                Gamma {
                    shape: values[0],
                    scale: values[1],
                }
            }
            "chisquared" | "chi2" | "chisq" => {
                need(1)?;
                ChiSquared { dof: values[0] }
            }
            "weibull" => {
                need(2)?;
                Weibull {
                    scale: values[0],
                    shape: values[1],
                }
            }
            "lognormal" => {
                need(2)?;
                Lognormal {
                    mu: values[0],
                    sigma2: values[1],
                }
            }
            "pareto" => {
                need(2)?;
                Pareto {
                    shape: values[0],
                    scale: values[1],
                }
            }
            "rayleigh" => {
                need(1)?;
                Rayleigh { sigma: values[0] }
            }
            "halfnormal" => {
                need(1)?;
                HalfNormal { sigma: values[0] }
            }
            "frechet" => {
                need(3)?;
                Frechet {
                    location: values[0],
                    scale: values[1],
                    shape: values[2],
                }
            }
            "absloggamma" | "loggamma" => {
                need(2)?;
                AbsLogGamma {
                    shape: values[0],
                    scale: values[1],
                }
            }
            "invgaussian" | "inversegaussian" => {
                need(2)?;
                InvGaussian {
                    mean: values[0],
                    shape: values[1],
                }
            }
            "burr" => {
                need(3)?;
                Burr {
                    scale: values[0],
                    eta: values[1],
                    sigma: values[2],
                }
            }
            _ => {
                return Err(Error::domain(format!(
                    "unknown distribution family '{name}'"
                )))
            }
        };
        alt.validate()?;
        Ok(alt)
    }
}

pub(crate) fn parse_params(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("invalid parameter '{}'", t.trim())))
        })
        .collect()
}

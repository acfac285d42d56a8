//! Quantile conditional moments of the Lévy law and their order-statistic
//! estimators.
//!
//! For `X ~ Lv(c)` and `G(p) = erf⁻¹(1 - p)` the conditional moments on
//! `{Q(a) ≤ X ≤ Q(b)}` reduce to incomplete integrals of `u^(-2k) e^(-u²)`
//! over `[G(b), G(a)]`, giving
//!
//! ```text
//! E[X  | a,b] = c · ( (h1(G(b)) - h1(G(a))) / (√π (b-a)) - 1 ),   h1(g) = e^(-g²)/g
//! E[X² | a,b] = c² · ( (h2(G(a)) - h2(G(b))) / (3√π (b-a)) + 1/3 ), h2(g) = e^(-g²)(g² - ½)/g³
//! ```
//!
//! with `h1(∞) = h2(∞) = 0` covering `a = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distributions::{levy_pdf, levy_quantile_unchecked, LevyParams};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::inverse_erf_complement;

/// A quantile window `0 ≤ a < b ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileSplit {
    pub a: f64,
    pub b: f64,
}

impl QuantileSplit {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::domain(format!(
                "quantile split requires 0 <= a < b <= 1, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    fn require_interior_upper(&self) -> Result<()> {
        if self.b >= 1.0 {
            return Err(Error::domain(format!(
                "theoretical conditional moments require b < 1, got b = {}",
                self.b
            )));
        }
        Ok(())
    }

    /// Order-statistic index range `[⌊na⌋, ⌊nb⌋)` (zero-based, half-open).
    pub fn window(&self, n: usize) -> (usize, usize) {
        (integer_part(n, self.a), integer_part(n, self.b))
    }

    pub fn window_size(&self, n: usize) -> usize {
        let (lo, hi) = self.window(n);
        hi - lo
    }

    /// Smallest `n` whose window holds at least `required` observations.
    pub fn min_sample_size(&self, required: usize) -> usize {
        let mut n = 1;
        while self.window_size(n) < required {
            n += 1;
        }
        n
    }

    fn check_window(&self, n: usize, required: usize) -> Result<(usize, usize)> {
        let (lo, hi) = self.window(n);
        if hi - lo < required {
            return Err(Error::Window {
                a: self.a,
                b: self.b,
                n,
                size: hi - lo,
                required,
                min_n: self.min_sample_size(required),
            });
        }
        Ok((lo, hi))
    }
}

impl std::fmt::Display for QuantileSplit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl std::str::FromStr for QuantileSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = crate::distributions::parse_params(s)?;
        if v.len() != 2 {
            return Err(Error::domain(format!("split must be 'a,b', got '{s}'")));
        }
        QuantileSplit::new(v[0], v[1])
    }
}

/// `⌊n·p⌋`. Products within 1e-9 of an integer snap to it, so decimal splits
/// such as `0.95·20` land on the integer their exact value has.
fn integer_part(n: usize, p: f64) -> usize {
    let x = n as f64 * p;
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// An i.i.d. sample with its order statistics cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sample must hold at least one observation"));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!(
                "observation {} is not finite ({})",
                i + 1,
                values[i]
            )));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { values, sorted })
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

    /// Order statistics `X_(1) ≤ … ≤ X_(n)`.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Applies `x ↦ scale·x + shift` to every observation.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|x| scale * x + shift).collect())
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }
}

fn g_values(split: &QuantileSplit) -> Result<(f64, f64)> {
    let ga = if split.a == 0.0 {
        f64::INFINITY
    } else {
        inverse_erf_complement(split.a)?
    };
    let gb = inverse_erf_complement(split.b)?;
    Ok((ga, gb))
}

fn check_scale(c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!(
            "scale must be finite and positive, got {c}"
        )));
    }
    Ok(())
}

/// Conditional mean `E[X | Q(a) ≤ X ≤ Q(b)]` of `Lv(c)`.
pub fn theoretical_qcm(split: &QuantileSplit, c: f64) -> Result<f64> {
    check_scale(c)?;
    split.require_interior_upper()?;
    let (ga, gb) = g_values(split)?;
    Ok(c * qcm_unit(ga, gb, split.b - split.a))
}

fn h1(g: f64) -> f64 {
    if g.is_infinite() {
        0.0
    } else {
        (-g * g).exp() / g
    }
}

fn h2(g: f64) -> f64 {
    if g.is_infinite() {
        0.0
    } else {
        (-g * g).exp() * (g * g - 0.5) / (g * g * g)
    }
}

fn qcm_unit(ga: f64, gb: f64, width: f64) -> f64 {
    (h1(gb) - h1(ga)) / (PI.sqrt() * width) - 1.0
}

/// Conditional variance of `Lv(c)` on the quantile window.
pub fn theoretical_qcv(split: &QuantileSplit, c: f64) -> Result<f64> {
    check_scale(c)?;
    split.require_interior_upper()?;
    let (ga, gb) = g_values(split)?;
    let width = split.b - split.a;
    let mean = qcm_unit(ga, gb, width);
    let second = (h2(ga) - h2(gb)) / (3.0 * PI.sqrt() * width) + 1.0 / 3.0;
    Ok(c * c * (second - mean * mean))
}

/// Conditional raw moment `E[X^order | M(a,b)]` of `Lv(c)` by adaptive
/// quadrature of `x^order·f(x; c)` over `[Q(a), Q(b)]`.
///
/// Independent of the closed forms; used to verify them.
pub fn qcmoment_quadrature_oracle(split: &QuantileSplit, c: f64, order: u32) -> Result<f64> {
    check_scale(c)?;
    split.require_interior_upper()?;
    if !(order == 1 || order == 2) {
        return Err(Error::domain(format!(
            "moment order must be 1 or 2, got {order}"
        )));
    }
    let params = LevyParams::scale(c)?;
    let lower = if split.a == 0.0 {
        0.0
    } else {
        levy_quantile_unchecked(split.a, &params)
    };
    let upper = levy_quantile_unchecked(split.b, &params);
    let width = split.b - split.a;
    let k = order as i32;
    let integral = quadrature::integrate(
        |x| x.powi(k) * levy_pdf(x, &params),
        lower,
        upper,
        1e-10 * width,
        1e-14,
        4000,
    )?;
    Ok(integral.value / width)
}

/// Conditional variance from the quadrature oracle.
pub fn quadrature_qcv(split: &QuantileSplit, c: f64) -> Result<f64> {
    let m1 = qcmoment_quadrature_oracle(split, c, 1)?;
    let m2 = qcmoment_quadrature_oracle(split, c, 2)?;
    Ok(m2 - m1 * m1)
}

/// Sample conditional mean: the average of `X_(⌊na⌋+1) … X_(⌊nb⌋)`.
pub fn sample_qcm(s: &Sample, split: &QuantileSplit) -> Result<f64> {
    let (lo, hi) = split.check_window(s.len(), 1)?;
    Ok(mean(&s.sorted[lo..hi]))
}

/// Sample conditional variance over the same window, divided by the window
/// size.
pub fn sample_qcv(s: &Sample, split: &QuantileSplit) -> Result<f64> {
    let (lo, hi) = split.check_window(s.len(), 2)?;
    let w = &s.sorted[lo..hi];
    let m = mean(w);
    Ok(w.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / w.len() as f64)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

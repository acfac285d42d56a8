//! Reproducible Monte Carlo engine: null simulation, calibration, p-values,
//! power and normality diagnostics.
//!
//! Replicate `i` of a run draws from `RandomStream::new(master_seed, offset + i)`
//! where `offset` is 0 for null draws and [`ALTERNATIVE_STREAM_OFFSET`] for
//! draws under an alternative. Results are collected in replicate order, so
//! output never depends on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condmoments::{QuantileSplit, Sample};
use crate::distributions::{sample_levy, Alternative, LevyParams};
use crate::error::{Error, Result};
use crate::estimators::{QcmEstimator, QcvEstimator, TransformedSample};
use crate::rng::RandomStream;
use crate::special::normal_cdf;
use crate::statistics::{Statistic, StatisticKind, StatisticSpec};

/// First stream index used for replicates drawn under an alternative (or for
/// fresh null samples used in size checks).
pub const ALTERNATIVE_STREAM_OFFSET: u64 = 1 << 63;

/// Replicates used for real-data p-values unless overridden.
pub const DEFAULT_TEST_REPLICATES: usize = 100_000;
/// Replicates used for power cells unless overridden.
pub const DEFAULT_POWER_REPLICATES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationPlan {
    pub master_seed: u64,
    pub replicates: usize,
    /// Number of worker threads; 0 or 1 runs on the calling thread. Never
    /// affects results.
    #[serde(skip)]
    pub worker_hint: usize,
}

impl ReplicationPlan {
    pub fn new(master_seed: u64, replicates: usize) -> Result<Self> {
        if replicates == 0 {
            return Err(Error::domain("replicate count must be at least 1"));
        }
        Ok(Self {
            master_seed,
            replicates,
            worker_hint: 0,
        })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_hint = workers;
        self
    }

    fn check(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::domain("replicate count must be at least 1"));
        }
        Ok(())
    }
}

/// Run `f` for every replicate index and return the results in index order.
pub fn run_replicates<T, F>(plan: &ReplicationPlan, offset: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RandomStream) -> T + Sync + Send,
{
    plan.check()?;
    let seed = plan.master_seed;
    let job = |i: u64| {
        let mut stream = RandomStream::new(seed, offset.wrapping_add(i));
        f(i, &mut stream)
    };
    let count = plan.replicates as u64;
    if plan.worker_hint <= 1 {
        return Ok((0..count).map(job).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.worker_hint)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(job).collect()))
}

/// Sorted draws of a statistic under `Lv(mu, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDistribution {
    pub spec: StatisticSpec,
    pub n: usize,
    pub levy: LevyParams,
    pub plan: ReplicationPlan,
    pub values: Vec<f64>,
}

impl NullDistribution {
    pub fn kind(&self) -> StatisticKind {
        self.spec.kind()
    }

    pub fn replicates(&self) -> usize {
        self.values.len()
    }

    /// Empirical quantile by inversion of the empirical CDF: the smallest
    /// draw whose rank is at least `p·B`.
    pub fn quantile(&self, p: f64) -> f64 {
        let b = self.values.len();
        let k = ((p * b as f64).ceil() as usize).clamp(1, b);
        self.values[k - 1]
    }
}

fn check_sample_size(statistic: &Statistic, n: usize) -> Result<()> {
    let min = statistic.min_sample_size();
    if n < min {
        return Err(Error::domain(format!(
            "{} needs samples of size at least {min}, got {n}",
            statistic.kind()
        )));
    }
    Ok(())
}

/// Null draws under the standard law `Lv(1)`; by pivotality this serves for
/// every scale.
pub fn simulate_null(
    spec: &StatisticSpec,
    n: usize,
    plan: &ReplicationPlan,
) -> Result<NullDistribution> {
    simulate_null_with(spec, n, &LevyParams::standard(), plan)
}

/// Null draws under an explicit `Lv(mu, c)`.
pub fn simulate_null_with(
    spec: &StatisticSpec,
    n: usize,
    levy: &LevyParams,
    plan: &ReplicationPlan,
) -> Result<NullDistribution> {
    let statistic = spec.prepare()?;
    check_sample_size(&statistic, n)?;
    let levy = LevyParams::new(levy.mu, levy.c)?;
    let draws = run_replicates(plan, 0, |i, stream| {
        sample_levy(&levy, n, stream)
            .and_then(Sample::new)
            .and_then(|s| statistic.evaluate(&s))
            .map_err(|e| Error::Replicate {
                index: i,
                source: Box::new(e),
            })
    })?;
    let mut values = draws.into_iter().collect::<Result<Vec<f64>>>()?;
    values.sort_by(f64::total_cmp);
    Ok(NullDistribution {
        spec: *spec,
        n,
        levy,
        plan: *plan,
        values,
    })
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "significance level must lie in (0, 1), got {level}"
        )));
    }
    Ok(())
}

/// Equal-tail thresholds: the empirical `level/2` and `1 - level/2` quantiles.
pub fn calibrate(nd: &NullDistribution, level: f64) -> Result<(f64, f64)> {
    check_level(level)?;
    Ok((nd.quantile(0.5 * level), nd.quantile(1.0 - 0.5 * level)))
}

/// Two-sided Monte Carlo p-value with the `+1` rank correction; never 0.
pub fn p_value(nd: &NullDistribution, observed: f64) -> f64 {
    let b = nd.values.len() as f64;
    let r_low = nd.values.partition_point(|&v| v <= observed) as f64;
    let r_high = nd.values.len() as f64 - nd.values.partition_point(|&v| v < observed) as f64;
    let low = (r_low + 1.0) / (b + 1.0);
    let high = (r_high + 1.0) / (b + 1.0);
    (2.0 * low.min(high)).min(1.0)
}

/// True when `observed` lies beyond every null draw, so the p-value is only
/// an upper bound.
pub fn p_value_saturated(nd: &NullDistribution, observed: f64) -> bool {
    match (nd.values.first(), nd.values.last()) {
        (Some(&lo), Some(&hi)) => observed < lo || observed > hi,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: StatisticKind,
    pub spec: StatisticSpec,
    pub n: usize,
    pub value: f64,
    pub p_value: f64,
    /// Set when no null draw was as extreme as the observed value; `p_value`
    /// is then the bound `2/(B+1)`.
    pub p_value_upper_bound: bool,
    pub level: f64,
    pub reject: bool,
    pub lower: f64,
    pub upper: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Build a report for an observed value against a simulated null.
pub fn report(nd: &NullDistribution, observed: f64, level: f64) -> Result<TestReport> {
    let (lower, upper) = calibrate(nd, level)?;
    Ok(TestReport {
        statistic: nd.kind(),
        spec: nd.spec,
        n: nd.n,
        value: observed,
        p_value: p_value(nd, observed),
        p_value_upper_bound: p_value_saturated(nd, observed),
        level,
        reject: observed < lower || observed > upper,
        lower,
        upper,
        replicates: nd.replicates(),
        seed: nd.plan.master_seed,
    })
}

/// Evaluate a statistic on data and compare it with its simulated null law
/// at the same sample size.
pub fn run_test(
    spec: &StatisticSpec,
    sample: &Sample,
    level: f64,
    plan: &ReplicationPlan,
) -> Result<TestReport> {
    check_level(level)?;
    let value = spec.prepare()?.evaluate(sample)?;
    let nd = simulate_null(spec, sample.len(), plan)?;
    report(&nd, value, level)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCell {
    pub statistic: StatisticKind,
    pub spec: StatisticSpec,
    pub alternative: Alternative,
    pub n: usize,
    pub level: f64,
    pub power: f64,
    pub standard_error: f64,
    pub replicates: usize,
    /// Replicates where the statistic could not be evaluated; each one is
    /// counted as a rejection.
    pub failures: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy)]
struct Rejections {
    rejected: usize,
    failures: usize,
    replicates: usize,
}

impl Rejections {
    fn rate(&self) -> f64 {
        self.rejected as f64 / self.replicates as f64
    }

    fn standard_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.replicates as f64).sqrt()
    }
}

fn count_rejections<G>(
    statistic: &Statistic,
    (lower, upper): (f64, f64),
    plan: &ReplicationPlan,
    generate: G,
) -> Result<Rejections>
where
    G: Fn(&mut RandomStream) -> Result<Vec<f64>> + Sync + Send,
{
    let outcomes = run_replicates(plan, ALTERNATIVE_STREAM_OFFSET, |i, stream| {
        let values = generate(stream).map_err(|e| Error::Replicate {
            index: i,
            source: Box::new(e),
        })?;
        // Data that break the statistic are maximally inconsistent with the
        // null and count as a rejection.
        Ok(
            match Sample::new(values).and_then(|s| statistic.evaluate(&s)) {
                Ok(v) => (v < lower || v > upper, false),
                Err(_) => (true, true),
            },
        )
    })?;
    let mut tally = Rejections {
        rejected: 0,
        failures: 0,
        replicates: plan.replicates,
    };
    for outcome in outcomes {
        let (rejected, failed) = outcome?;
        tally.rejected += rejected as usize;
        tally.failures += failed as usize;
    }
    Ok(tally)
}

/// Power against an alternative using thresholds from an existing null.
pub fn power_against(
    nd: &NullDistribution,
    alt: &Alternative,
    level: f64,
    plan_alt: &ReplicationPlan,
) -> Result<PowerCell> {
    alt.validate()?;
    let thresholds = calibrate(nd, level)?;
    let statistic = nd.spec.prepare()?;
    let n = nd.n;
    let tally = count_rejections(&statistic, thresholds, plan_alt, |stream| {
        alt.sample(n, stream)
    })?;
    Ok(PowerCell {
        statistic: nd.kind(),
        spec: nd.spec,
        alternative: *alt,
        n,
        level,
        power: tally.rate(),
        standard_error: tally.standard_error(),
        replicates: tally.replicates,
        failures: tally.failures,
        lower: thresholds.0,
        upper: thresholds.1,
    })
}

/// Simulate the null at `n`, calibrate at `level` and estimate the rejection
/// rate under `alt`.
pub fn power_study(
    spec: &StatisticSpec,
    alt: &Alternative,
    n: usize,
    level: f64,
    plan_null: &ReplicationPlan,
    plan_alt: &ReplicationPlan,
) -> Result<PowerCell> {
    alt.validate()?;
    check_level(level)?;
    let nd = simulate_null(spec, n, plan_null)?;
    power_against(&nd, alt, level, plan_alt)
}

/// Rejection rate on fresh Lévy samples drawn from streams disjoint from the
/// ones that built `nd`. Returns `(rate, standard_error)`.
pub fn empirical_size(
    nd: &NullDistribution,
    level: f64,
    plan: &ReplicationPlan,
) -> Result<(f64, f64)> {
    let thresholds = calibrate(nd, level)?;
    let statistic = nd.spec.prepare()?;
    let (levy, n) = (nd.levy, nd.n);
    let tally = count_rejections(&statistic, thresholds, plan, |stream| {
        sample_levy(&levy, n, stream)
    })?;
    Ok((tally.rate(), tally.standard_error()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub statistic: StatisticKind,
    pub spec: StatisticSpec,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_dev: f64,
    /// Kolmogorov distance between the standardized draws and `N(0, 1)`.
    pub ks_distance: f64,
    /// `bins + 1` edges spanning the range of the draws.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

pub const MIN_DIAGNOSTIC_REPLICATES: usize = 1000;

/// Histogram, moment-fitted normal and normal-fit Kolmogorov distance of a
/// statistic's null law.
pub fn normality_diagnostic(
    spec: &StatisticSpec,
    n: usize,
    plan: &ReplicationPlan,
    bins: usize,
) -> Result<DiagnosticReport> {
    if plan.replicates < MIN_DIAGNOSTIC_REPLICATES {
        return Err(Error::domain(format!(
            "diagnostics need at least {MIN_DIAGNOSTIC_REPLICATES} replicates, got {}",
            plan.replicates
        )));
    }
    if bins == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    let nd = simulate_null(spec, n, plan)?;
    let (mean, std_dev) = mean_and_std(&nd.values);
    let (bin_edges, counts) = histogram(&nd.values, bins);
    Ok(DiagnosticReport {
        statistic: nd.kind(),
        spec: *spec,
        n,
        replicates: nd.replicates(),
        seed: plan.master_seed,
        mean,
        std_dev,
        ks_distance: normal_fit_ks(&nd.values, mean, std_dev),
        bin_edges,
        counts,
    })
}

/// Mean and (population) standard deviation.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Kolmogorov distance between sorted draws standardized by `(mean, sd)` and
/// the standard normal CDF.
pub fn normal_fit_ks(sorted: &[f64], mean: f64, sd: f64) -> f64 {
    let b = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = if sd > 0.0 {
                normal_cdf((v - mean) / sd)
            } else if v < mean {
                0.0
            } else {
                1.0
            };
            ((i + 1) as f64 / b - f).max(f - i as f64 / b)
        })
        .fold(0.0, f64::max)
}

fn histogram(sorted: &[f64], bins: usize) -> (Vec<f64>, Vec<u64>) {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins)
        .map(|k| if k == bins { hi } else { lo + k as f64 * width })
        .collect();
    let mut counts = vec![0u64; bins];
    for &v in sorted {
        let k = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[k] += 1;
    }
    (edges, counts)
}

/// Two-sample Kolmogorov–Smirnov distance between sorted samples.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Scale estimates from one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorDraw {
    pub qcm: f64,
    pub qcv: f64,
    pub mle: f64,
    pub cov: f64,
}

/// The four scale estimators on independent `Lv(mu, c)` samples of size `n`.
pub fn simulate_estimators(
    levy: &LevyParams,
    n: usize,
    qcm_split: QuantileSplit,
    qcv_split: QuantileSplit,
    plan: &ReplicationPlan,
) -> Result<Vec<EstimatorDraw>> {
    let levy = LevyParams::new(levy.mu, levy.c)?;
    let qcm = QcmEstimator::new(qcm_split)?;
    let qcv = QcvEstimator::new(qcv_split)?;
    let draws = run_replicates(plan, 0, |i, stream| {
        let mut eval = || -> Result<EstimatorDraw> {
            let s = Sample::new(sample_levy(&levy, n, stream)?)?;
            let t = TransformedSample::new(&s)?;
            Ok(EstimatorDraw {
                qcm: qcm.estimate(&s)?,
                qcv: qcv.estimate(&s)?,
                mle: t.mle(),
                cov: t.cov()?,
            })
        };
        eval().map_err(|e| Error::Replicate {
            index: i,
            source: Box::new(e),
        })
    })?;
    draws.into_iter().collect()
}

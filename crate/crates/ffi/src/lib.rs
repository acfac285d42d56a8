//! C interface to `levygof`.
//!
//! Every fallible function returns a [`LevygofStatus`] and writes its result
//! through an out-pointer. The message of the most recent failure on the
//! calling thread is available from [`levygof_last_error`].
//!
//! Samples and simulated null distributions are opaque handles created by
//! `*_new` / `*_simulate` and released with the matching `*_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levygof::condmoments::{theoretical_qcm, theoretical_qcv};
use levygof::distributions::{levy_cdf, levy_pdf, levy_quantile, sample_levy};
use levygof::estimators::{estimate, EstimatorKind};
use levygof::montecarlo::{self, ReplicationPlan};
use levygof::{Error, LevyParams, QuantileSplit, RandomStream, StatisticKind, StatisticSpec};

use levygof::montecarlo::NullDistribution;
use levygof::Sample;

/// Opaque sample handle.
pub struct LevygofSample(Sample);

/// Opaque handle to a simulated null distribution.
pub struct LevygofNull(NullDistribution);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevygofStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Estimation = 3,
    Window = 4,
    Quadrature = 5,
    Replicate = 6,
    Parse = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevygofEstimator {
    Qcm = 0,
    Qcv = 1,
    Mle = 2,
    Cov = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevygofStatistic {
    Vn = 0,
    On = 1,
    Tn = 2,
    Cn = 3,
    Ran = 4,
    DeltaN = 5,
}

impl From<LevygofEstimator> for EstimatorKind {
    fn from(k: LevygofEstimator) -> Self {
        match k {
            LevygofEstimator::Qcm => EstimatorKind::Qcm,
            LevygofEstimator::Qcv => EstimatorKind::Qcv,
            LevygofEstimator::Mle => EstimatorKind::Mle,
            LevygofEstimator::Cov => EstimatorKind::Cov,
        }
    }
}

impl From<LevygofStatistic> for StatisticKind {
    fn from(k: LevygofStatistic) -> Self {
        match k {
            LevygofStatistic::Vn => StatisticKind::Vn,
            LevygofStatistic::On => StatisticKind::On,
            LevygofStatistic::Tn => StatisticKind::Tn,
            LevygofStatistic::Cn => StatisticKind::Cn,
            LevygofStatistic::Ran => StatisticKind::Ran,
            LevygofStatistic::DeltaN => StatisticKind::DeltaN,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> LevygofStatus {
    match e {
        Error::Domain(_) => LevygofStatus::Domain,
        Error::Estimation(_) => LevygofStatus::Estimation,
        Error::Window { .. } => LevygofStatus::Window,
        Error::Quadrature { .. } => LevygofStatus::Quadrature,
        Error::Replicate { .. } => LevygofStatus::Replicate,
        Error::Parse { .. } => LevygofStatus::Parse,
        Error::Io { .. } => LevygofStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> LevygofStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LevygofStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            LevygofStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            LevygofStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

/// Copy the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the full message
/// length in bytes, excluding the terminator.
#[no_mangle]
pub unsafe extern "C" fn levygof_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_levy_cdf(
    x: f64,
    mu: f64,
    c: f64,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let p = LevyParams::new(mu, c)?;
        *out(result, "result")? = levy_cdf(x, &p);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_levy_pdf(
    x: f64,
    mu: f64,
    c: f64,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let p = LevyParams::new(mu, c)?;
        *out(result, "result")? = levy_pdf(x, &p);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_levy_quantile(
    prob: f64,
    mu: f64,
    c: f64,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let p = LevyParams::new(mu, c)?;
        *out(result, "result")? = levy_quantile(prob, &p)?;
        Ok(())
    })
}

/// Fill `values[0..n]` with `Lv(mu, c)` draws from stream `(seed, stream)`.
#[no_mangle]
pub unsafe extern "C" fn levygof_levy_sample(
    mu: f64,
    c: f64,
    n: usize,
    seed: u64,
    stream: u64,
    values: *mut f64,
) -> LevygofStatus {
    guard(|| {
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let p = LevyParams::new(mu, c)?;
        let draws = sample_levy(&p, n, &mut RandomStream::new(seed, stream))?;
        std::slice::from_raw_parts_mut(values, n).copy_from_slice(&draws);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_theoretical_qcm(
    a: f64,
    b: f64,
    c: f64,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        *out(result, "result")? = theoretical_qcm(&QuantileSplit::new(a, b)?, c)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_theoretical_qcv(
    a: f64,
    b: f64,
    c: f64,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        *out(result, "result")? = theoretical_qcv(&QuantileSplit::new(a, b)?, c)?;
        Ok(())
    })
}

/// Copy `len` observations into a new sample handle.
#[no_mangle]
pub unsafe extern "C" fn levygof_sample_new(
    values: *const f64,
    len: usize,
    sample: *mut *mut LevygofSample,
) -> LevygofStatus {
    guard(|| {
        let slot = out(sample, "sample")?;
        *slot = ptr::null_mut();
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let s = Sample::new(std::slice::from_raw_parts(values, len).to_vec())?;
        *slot = Box::into_raw(Box::new(LevygofSample(s)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_sample_free(sample: *mut LevygofSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

#[no_mangle]
pub unsafe extern "C" fn levygof_sample_len(sample: *const LevygofSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.len())
}

/// Scale estimate. `a` and `b` give the quantile split for QCM and QCV and
/// are ignored otherwise.
#[no_mangle]
pub unsafe extern "C" fn levygof_estimate(
    sample: *const LevygofSample,
    method: LevygofEstimator,
    a: f64,
    b: f64,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let s = &handle(sample, "sample")?.0;
        let kind = EstimatorKind::from(method);
        let split = match kind {
            EstimatorKind::Qcm | EstimatorKind::Qcv => Some(QuantileSplit::new(a, b)?),
            _ => None,
        };
        *out(result, "result")? = estimate(kind, s, split.as_ref())?.value;
        Ok(())
    })
}

/// Statistic with its default splits and tuning constant.
#[no_mangle]
pub unsafe extern "C" fn levygof_statistic(
    sample: *const LevygofSample,
    kind: LevygofStatistic,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let s = &handle(sample, "sample")?.0;
        let spec = StatisticSpec::default_for(kind.into());
        *out(result, "result")? = spec.prepare()?.evaluate(s)?;
        Ok(())
    })
}

/// Simulate the null law of a statistic (default parameters) at sample size
/// `n` under `Lv(1)`. `workers` does not affect the result.
#[no_mangle]
pub unsafe extern "C" fn levygof_null_simulate(
    kind: LevygofStatistic,
    n: usize,
    seed: u64,
    replicates: usize,
    workers: usize,
    null: *mut *mut LevygofNull,
) -> LevygofStatus {
    guard(|| {
        let slot = out(null, "null")?;
        *slot = ptr::null_mut();
        let plan = ReplicationPlan::new(seed, replicates)?.with_workers(workers);
        let spec = StatisticSpec::default_for(kind.into());
        let nd = montecarlo::simulate_null(&spec, n, &plan)?;
        *slot = Box::into_raw(Box::new(LevygofNull(nd)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_null_free(null: *mut LevygofNull) {
    if !null.is_null() {
        drop(Box::from_raw(null));
    }
}

#[no_mangle]
pub unsafe extern "C" fn levygof_null_len(null: *const LevygofNull) -> usize {
    null.as_ref().map_or(0, |n| n.0.replicates())
}

/// Copy the sorted null draws into `values`, which must hold
/// `levygof_null_len(null)` doubles.
#[no_mangle]
pub unsafe extern "C" fn levygof_null_values(
    null: *const LevygofNull,
    values: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let nd = &handle(null, "null")?.0;
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        std::slice::from_raw_parts_mut(values, nd.values.len()).copy_from_slice(&nd.values);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_null_calibrate(
    null: *const LevygofNull,
    level: f64,
    lower: *mut f64,
    upper: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let nd = &handle(null, "null")?.0;
        let (lo, hi) = montecarlo::calibrate(nd, level)?;
        *out(lower, "lower")? = lo;
        *out(upper, "upper")? = hi;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn levygof_null_p_value(
    null: *const LevygofNull,
    observed: f64,
    result: *mut f64,
) -> LevygofStatus {
    guard(|| {
        let nd = &handle(null, "null")?.0;
        *out(result, "result")? = montecarlo::p_value(nd, observed);
        Ok(())
    })
}

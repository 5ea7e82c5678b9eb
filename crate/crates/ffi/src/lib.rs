//! C ABI over the descents engine.
//!
//! Every entry point returns a [`DescentsStatus`]; on failure the message is
//! available from [`descents_last_error`] on the same thread. Panics are
//! caught at the boundary and reported as `DESCENTS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use descents::exact::{render, to_f64};
use descents::measures::parsimony_distance;
use descents::moments::{moments_c, moments_d_c, moments_d_r};
use descents::permcore::{cyclic_descent_count, descent_count};
use descents::sampler::{exact_law, sample_c, sample_r, stream_rng, SampleStatistic};
use descents::stein::{tv_report, TvStatistic};
use descents::{ExactPmf, Family, Flavor};
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentsStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Internal = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentsMeasure {
    R = 0,
    C = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentsStatistic {
    D = 0,
    C = 1,
    Parsimony = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentsMomentStatistic {
    CUnderC = 0,
    DUnderC = 1,
    DUnderR = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescentsTvStatistic {
    /// k - d under C_{k,n}
    KMinusDUnderC = 0,
    /// k - c under C_{k,n}
    KMinusCUnderC = 1,
    /// k - 1 - d under R_{k,n}
    KMinus1MinusDUnderR = 2,
}

/// Float renderings of the exact moments.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DescentsMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DescentsTvReport {
    pub lambda: f64,
    pub tv_exact: f64,
    /// Certified half-width of the interval around `tv_exact`.
    pub tv_width: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Exact law of a statistic (opaque).
pub struct DescentsPmf {
    pmf: ExactPmf,
}

/// Seeded stream of sampled statistic values (opaque).
pub struct DescentsSampler {
    family: Family,
    stat: SampleStatistic,
    k: u64,
    n: usize,
    rng: ChaCha8Rng,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(DescentsStatus, String);

impl From<descents::Error> for Failure {
    fn from(e: descents::Error) -> Self {
        let status = match e {
            descents::Error::Inconsistent(_) => DescentsStatus::Internal,
            _ => DescentsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DescentsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DescentsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DescentsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            DescentsStatus::Panic
        }
    }
}

fn family(m: DescentsMeasure) -> Family {
    match m {
        DescentsMeasure::R => Family::R,
        DescentsMeasure::C => Family::C,
    }
}

fn statistic(s: DescentsStatistic) -> SampleStatistic {
    match s {
        DescentsStatistic::D => SampleStatistic::D,
        DescentsStatistic::C => SampleStatistic::C,
        DescentsStatistic::Parsimony => SampleStatistic::Parsimony,
    }
}

fn n_usize(n: u32) -> usize {
    n as usize
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("engine output has no NUL").into_raw()
}

/// Message for the most recent failure on this thread, or NULL. Valid until
/// the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn descents_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn descents_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn descents_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the exact law of `stat` under the given measure.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn descents_pmf_new(
    measure: DescentsMeasure,
    stat: DescentsStatistic,
    k: u64,
    n: u32,
    out: *mut *mut DescentsPmf,
) -> DescentsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let pmf = exact_law(family(measure), statistic(stat), k, n_usize(n))?;
        *out = Box::into_raw(Box::new(DescentsPmf { pmf }));
        Ok(())
    })
}

/// # Safety
/// `pmf` must be NULL or a handle from [`descents_pmf_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn descents_pmf_free(pmf: *mut DescentsPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Number of support points.
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_pmf_len(pmf: *const DescentsPmf, out: *mut usize) -> DescentsStatus {
    guard(|| {
        let pmf = pmf.as_ref().ok_or_else(|| null("pmf"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = pmf.pmf.len();
        Ok(())
    })
}

/// Support point `index` (ascending) and its mass as a double.
///
/// # Safety
/// `pmf` must be a live handle; `value` and `prob` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_pmf_entry(
    pmf: *const DescentsPmf,
    index: usize,
    value: *mut u64,
    prob: *mut f64,
) -> DescentsStatus {
    guard(|| {
        let pmf = &pmf.as_ref().ok_or_else(|| null("pmf"))?.pmf;
        let value = value.as_mut().ok_or_else(|| null("value"))?;
        let prob = prob.as_mut().ok_or_else(|| null("prob"))?;
        if index >= pmf.len() {
            return Err(Failure(
                DescentsStatus::InvalidArgument,
                format!("index {index} out of range 0..{}", pmf.len()),
            ));
        }
        *value = pmf.support()[index];
        *prob = to_f64(&pmf.masses()[index]);
        Ok(())
    })
}

/// Exact mass at `value` as a reduced "num/den" string; free with
/// [`descents_string_free`].
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_pmf_mass(
    pmf: *const DescentsPmf,
    value: u64,
    out: *mut *mut c_char,
) -> DescentsStatus {
    guard(|| {
        let pmf = &pmf.as_ref().ok_or_else(|| null("pmf"))?.pmf;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(render(&pmf.prob(value)));
        Ok(())
    })
}

/// The law as a JSON object of exact strings; free with
/// [`descents_string_free`].
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_pmf_to_json(pmf: *const DescentsPmf, out: *mut *mut c_char) -> DescentsStatus {
    guard(|| {
        let pmf = &pmf.as_ref().ok_or_else(|| null("pmf"))?.pmf;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(pmf.to_json().to_string());
        Ok(())
    })
}

/// Seeded single-stream sampler of `stat` under the given measure.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_sampler_new(
    measure: DescentsMeasure,
    stat: DescentsStatistic,
    k: u64,
    n: u32,
    seed: u64,
    out: *mut *mut DescentsSampler,
) -> DescentsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (family, stat, n) = (family(measure), statistic(stat), n_usize(n));
        // Same validation as the exact law, so invalid combinations fail here.
        exact_law(family, stat, k, n)?;
        *out = Box::into_raw(Box::new(DescentsSampler {
            family,
            stat,
            k,
            n,
            rng: stream_rng(seed, 0),
        }));
        Ok(())
    })
}

/// # Safety
/// `sampler` must be NULL or a handle from [`descents_sampler_new`].
#[no_mangle]
pub unsafe extern "C" fn descents_sampler_free(sampler: *mut DescentsSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Draws one value of the statistic.
///
/// # Safety
/// `sampler` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_sampler_next(sampler: *mut DescentsSampler, out: *mut u64) -> DescentsStatus {
    guard(|| {
        let s = sampler.as_mut().ok_or_else(|| null("sampler"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match s.family {
            Family::R => {
                let d = descent_count(&sample_r(s.k, s.n, &mut s.rng)?) as u64;
                match s.stat {
                    SampleStatistic::Parsimony => parsimony_distance(d, Flavor::Riffle)? as u64,
                    _ => d,
                }
            }
            Family::C => {
                let p = sample_c(s.k, s.n, &mut s.rng)?;
                match s.stat {
                    SampleStatistic::D => descent_count(&p) as u64,
                    SampleStatistic::C => cyclic_descent_count(&p)? as u64,
                    SampleStatistic::Parsimony => {
                        parsimony_distance(cyclic_descent_count(&p)? as u64, Flavor::CutRiffle)? as u64
                    }
                }
            }
        };
        Ok(())
    })
}

/// Exact first two moments of the chosen statistic, rendered as doubles.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_moments(
    statistic: DescentsMomentStatistic,
    k: u64,
    n: u32,
    out: *mut DescentsMoments,
) -> DescentsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let n = n_usize(n);
        let r = match statistic {
            DescentsMomentStatistic::CUnderC => moments_c(k, n)?,
            DescentsMomentStatistic::DUnderC => moments_d_c(k, n)?,
            DescentsMomentStatistic::DUnderR => moments_d_r(k, n)?,
        };
        *out = DescentsMoments {
            mean: to_f64(&r.mean_exact),
            second_moment: to_f64(&r.second_exact),
            variance: to_f64(&r.variance_exact),
        };
        Ok(())
    })
}

/// Total variation to Poisson and the Stein bound.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn descents_tv(
    statistic: DescentsTvStatistic,
    k: u64,
    n: u32,
    out: *mut DescentsTvReport,
) -> DescentsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let s = match statistic {
            DescentsTvStatistic::KMinusDUnderC => TvStatistic::KMinusDUnderC,
            DescentsTvStatistic::KMinusCUnderC => TvStatistic::KMinusCUnderC,
            DescentsTvStatistic::KMinus1MinusDUnderR => TvStatistic::KMinus1MinusDUnderR,
        };
        let r = tv_report(k, n_usize(n), s)?;
        *out = DescentsTvReport {
            lambda: r.lambda,
            tv_exact: r.tv_exact,
            tv_width: r.tv_width,
            bound: r.bound,
            slack: r.slack,
        };
        Ok(())
    })
}

/// Copies the most recent error message into a freshly allocated string,
/// or returns NULL when there is none.
#[no_mangle]
pub extern "C" fn descents_last_error_copy() -> *mut c_char {
    let p = descents_last_error();
    if p.is_null() {
        return ptr::null_mut();
    }
    // SAFETY: points into the thread-local CString, alive for this call.
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    into_c_string(s)
}

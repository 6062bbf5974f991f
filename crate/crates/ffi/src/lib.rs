//! C ABI over `qsv-core`.
//!
//! Every fallible call returns a [`QsvStatus`]; on failure the message is
//! available from [`qsv_last_error`] on the same thread. Handles returned by
//! `*_new` must be released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex;
use qsv_core::harness::{classify, run_suite, SuiteConfig};
use qsv_core::numeric::{DoubleDouble, Real, C};
use qsv_core::qcore::{self, verify_theta_quasiperiodicity, QContext};
use qsv_core::{QsvError, Status, VerificationReport};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The computation was well posed but hit a pole or degenerate input.
    Evaluation = 3,
    Nonconvergent = 4,
    Config = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsvPrecision {
    Double = 0,
    Extended = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QsvComplex {
    pub re: f64,
    pub im: f64,
}

/// Outcome of a single identity check.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QsvCheck {
    pub passed: bool,
    pub lhs: QsvComplex,
    pub rhs: QsvComplex,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QsvSuiteSummary {
    pub reports: usize,
    pub pass: usize,
    pub fail: usize,
    pub rejected: usize,
    pub nonconvergent: usize,
    pub max_rel_residual: f64,
    pub exit_code: i32,
}

enum Inner {
    Double(QContext<f64>),
    Extended(QContext<DoubleDouble>),
}

/// Opaque evaluation context for a fixed nome `q`.
pub struct QsvContext {
    inner: Inner,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(QsvStatus, String);

impl From<QsvError> for Failure {
    fn from(e: QsvError) -> Self {
        let status = match (&e, classify(&e)) {
            (QsvError::Io(_), _) => QsvStatus::Io,
            (_, None) => QsvStatus::Config,
            (QsvError::InvalidContext(_) | QsvError::InvalidIndex(_), _) => QsvStatus::InvalidArgument,
            (_, Some(Status::Nonconvergent)) => QsvStatus::Nonconvergent,
            _ => QsvStatus::Evaluation,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QsvStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QsvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QsvStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QsvStatus::Panic
        }
    }
}

fn to_c<R: Real>(z: QsvComplex) -> C<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

fn from_c<R: Real>(z: C<R>) -> QsvComplex {
    QsvComplex {
        re: z.re.to_f64(),
        im: z.im.to_f64(),
    }
}

fn check_of(r: &VerificationReport) -> QsvCheck {
    QsvCheck {
        passed: r.passed(),
        lhs: QsvComplex { re: r.lhs_re, im: r.lhs_im },
        rhs: QsvComplex { re: r.rhs_re, im: r.rhs_im },
        abs_residual: r.abs_residual,
        rel_residual: r.rel_residual,
        tolerance: r.tolerance,
    }
}

unsafe fn context<'a>(ctx: *const QsvContext) -> Result<&'a Inner, Failure> {
    ctx.as_ref().map(|c| &c.inner).ok_or_else(|| null("context"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Evaluates `f` at the context's precision and narrows the result to f64.
fn eval(
    inner: &Inner,
    f64_fn: impl FnOnce(&QContext<f64>) -> qsv_core::Result<C<f64>>,
    dd_fn: impl FnOnce(&QContext<DoubleDouble>) -> qsv_core::Result<C<DoubleDouble>>,
) -> Result<QsvComplex, Failure> {
    Ok(match inner {
        Inner::Double(c) => from_c(f64_fn(c)?),
        Inner::Extended(c) => from_c(dd_fn(c)?),
    })
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn qsv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a context for `q` with `0 < |q| < 1`. `precision` takes a
/// [`QsvPrecision`] value.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qsv_context_new(q: QsvComplex, precision: u32, out: *mut *mut QsvContext) -> QsvStatus {
    guard(|| {
        let q = Complex::new(q.re, q.im);
        let inner = match precision {
            p if p == QsvPrecision::Double as u32 => Inner::Double(QContext::from_c64(q)?),
            p if p == QsvPrecision::Extended as u32 => Inner::Extended(QContext::from_c64(q)?),
            p => return Err(Failure(QsvStatus::InvalidArgument, format!("unknown precision {p}"))),
        };
        write(out, Box::into_raw(Box::new(QsvContext { inner })))
    })
}

/// Overrides the relative tolerance used by the `qsv_check_*` calls.
///
/// # Safety
/// `ctx` must be a live handle from [`qsv_context_new`].
#[no_mangle]
pub unsafe extern "C" fn qsv_context_set_tolerance(ctx: *mut QsvContext, tol: f64) -> QsvStatus {
    guard(|| {
        let c = ctx.as_mut().ok_or_else(|| null("context"))?;
        c.inner = match &c.inner {
            Inner::Double(x) => Inner::Double(x.clone().with_verify_tol(tol)?),
            Inner::Extended(x) => Inner::Extended(x.clone().with_verify_tol(tol)?),
        };
        Ok(())
    })
}

/// # Safety
/// `ctx` must be null or a handle from [`qsv_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qsv_context_free(ctx: *mut QsvContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// `(a; q)_k` for any integer `k`.
///
/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsv_qpoch(ctx: *const QsvContext, a: QsvComplex, k: i64, out: *mut QsvComplex) -> QsvStatus {
    guard(|| {
        let v = eval(context(ctx)?, |c| qcore::qpoch(c, to_c(a), k), |c| qcore::qpoch(c, to_c(a), k))?;
        write(out, v)
    })
}

/// `(a; q)_∞`.
///
/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsv_qpoch_inf(ctx: *const QsvContext, a: QsvComplex, out: *mut QsvComplex) -> QsvStatus {
    guard(|| {
        let v = eval(context(ctx)?, |c| qcore::qpoch_inf(c, to_c(a)), |c| qcore::qpoch_inf(c, to_c(a)))?;
        write(out, v)
    })
}

/// `θ(x; q) = (x; q)_∞ (q/x; q)_∞`.
///
/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsv_theta(ctx: *const QsvContext, x: QsvComplex, out: *mut QsvComplex) -> QsvStatus {
    guard(|| {
        let v = eval(context(ctx)?, |c| qcore::theta(c, to_c(x)), |c| qcore::theta(c, to_c(x)))?;
        write(out, v)
    })
}

/// Checks `θ(x q^k) = (−1)^k q^{−k(k−1)/2} x^{−k} θ(x)`.
///
/// # Safety
/// `ctx` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsv_check_theta_quasiperiodicity(
    ctx: *const QsvContext,
    x: QsvComplex,
    k: i64,
    out: *mut QsvCheck,
) -> QsvStatus {
    guard(|| {
        let r = match context(ctx)? {
            Inner::Double(c) => verify_theta_quasiperiodicity(c, to_c(x), k)?,
            Inner::Extended(c) => verify_theta_quasiperiodicity(c, to_c(x), k)?,
        };
        write(out, check_of(&r))
    })
}

/// Runs a suite described by a TOML document (same keys as `qsv --config`).
///
/// When `jsonl` is non-null it receives the report stream, to be released
/// with [`qsv_string_free`].
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `summary` must be writable;
/// `jsonl` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qsv_run_suite(
    config_toml: *const c_char,
    summary: *mut QsvSuiteSummary,
    jsonl: *mut *mut c_char,
) -> QsvStatus {
    guard(|| {
        if config_toml.is_null() {
            return Err(null("config"));
        }
        if summary.is_null() {
            return Err(null("summary"));
        }
        let text = CStr::from_ptr(config_toml)
            .to_str()
            .map_err(|_| Failure(QsvStatus::InvalidArgument, "config is not valid UTF-8".into()))?;
        let outcome = run_suite(&SuiteConfig::from_toml_str(text)?)?;
        let s = &outcome.summary;
        write(
            summary,
            QsvSuiteSummary {
                reports: s.reports,
                pass: s.pass,
                fail: s.fail,
                rejected: s.rejected,
                nonconvergent: s.nonconvergent,
                max_rel_residual: s.max_rel_residual,
                exit_code: s.exit_code,
            },
        )?;
        if !jsonl.is_null() {
            let mut buf = Vec::new();
            outcome.write_jsonl(&mut buf)?;
            // serde_json escapes control characters, so there is no interior NUL
            jsonl.write(CString::new(buf).expect("JSON contains no NUL").into_raw());
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qsv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

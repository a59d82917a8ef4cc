//! C ABI over `qbafx`.
//!
//! Frameworks live behind an opaque `QbafxQbaf` handle. Every fallible call
//! returns a `QbafxStatus`; on failure a message for the calling thread is
//! available from `qbafx_last_error_message`. Strings returned through out
//! parameters are owned by the caller and released with `qbafx_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qbafx::attribution::{explain_all, AttributionReport, Kind, Method};
use qbafx::error::{AttributionError, SolveError};
use qbafx::render::{render_dot, RenderSpec};
use qbafx::semantics::{solve_qe, SolverConfig};
use qbafx::truth::{induce_qbaf, parse_reports};
use qbafx::{ArgumentId, Qbaf};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QbafxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or inconsistent input: JSON, CSV, ids, config values.
    InvalidInput = 3,
    NonConvergence = 4,
    TooLargeForExact = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QbafxKind {
    Arguments = 0,
    Relations = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QbafxMethod {
    Removal = 0,
    ShapleyExact = 1,
    ShapleySampled = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QbafxSolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// Opaque framework handle.
pub struct QbafxQbaf {
    inner: Qbaf,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(QbafxStatus, String);

impl Failure {
    fn input(e: impl ToString) -> Self {
        Failure(QbafxStatus::InvalidInput, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::NonConvergence { .. } => {
                Failure(QbafxStatus::NonConvergence, e.to_string())
            }
            SolveError::InvalidConfig(_) => Failure::input(e),
        }
    }
}

impl From<AttributionError> for Failure {
    fn from(e: AttributionError) -> Self {
        let status = match e.root() {
            AttributionError::NonConvergence { .. } => QbafxStatus::NonConvergence,
            AttributionError::TooLargeForExact { .. } => QbafxStatus::TooLargeForExact,
            _ => QbafxStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QbafxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            QbafxStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal error".into());
            QbafxStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(
            QbafxStatus::NullPointer,
            "null string argument".into(),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(QbafxStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a>(h: *const QbafxQbaf) -> Result<&'a Qbaf, Failure> {
    h.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(QbafxStatus::NullPointer, "null framework handle".into()))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(
            QbafxStatus::NullPointer,
            "null output pointer".into(),
        ))
    } else {
        Ok(())
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s)
        .map_err(|_| Failure(QbafxStatus::Internal, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_handle(out: *mut *mut QbafxQbaf, q: Qbaf) {
    *out = Box::into_raw(Box::new(QbafxQbaf { inner: q }));
}

fn solver(cfg: QbafxSolverConfig) -> Result<SolverConfig, Failure> {
    Ok(SolverConfig::new(cfg.tolerance, cfg.max_iterations)?)
}

/// Message describing the last failure on this thread, or NULL after a
/// success. Valid until the next `qbafx_*` call on the same thread.
#[no_mangle]
pub extern "C" fn qbafx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qbafx_solver_config_default() -> QbafxSolverConfig {
    QbafxSolverConfig {
        tolerance: SolverConfig::DEFAULT_TOLERANCE,
        max_iterations: SolverConfig::DEFAULT_MAX_ITERATIONS,
    }
}

/// Parses a framework from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qbafx_qbaf_from_json(
    json: *const c_char,
    out: *mut *mut QbafxQbaf,
) -> QbafxStatus {
    guard(|| {
        check_out(out)?;
        let q = Qbaf::from_json(text(json)?).map_err(Failure::input)?;
        put_handle(out, q);
        Ok(())
    })
}

/// Induces a framework from `source,object,value` report CSV.
///
/// # Safety
/// `csv` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qbafx_qbaf_from_reports_csv(
    csv: *const c_char,
    out: *mut *mut QbafxQbaf,
) -> QbafxStatus {
    guard(|| {
        check_out(out)?;
        let tdn = parse_reports(text(csv)?).map_err(Failure::input)?;
        let q = induce_qbaf(&tdn).map_err(Failure::input)?;
        put_handle(out, q);
        Ok(())
    })
}

/// # Safety
/// `h` must be NULL or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qbafx_qbaf_free(h: *mut QbafxQbaf) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn qbafx_qbaf_num_arguments(h: *const QbafxQbaf) -> usize {
    h.as_ref().map_or(0, |h| h.inner.num_arguments())
}

/// # Safety
/// `h` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn qbafx_qbaf_num_edges(h: *const QbafxQbaf) -> usize {
    h.as_ref().map_or(0, |h| h.inner.edges().len())
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qbafx_qbaf_to_json(
    h: *const QbafxQbaf,
    out: *mut *mut c_char,
) -> QbafxStatus {
    guard(|| {
        check_out(out)?;
        put_string(out, handle(h)?.to_json())
    })
}

/// Solves the framework and writes `argument,strength` CSV to `out`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qbafx_solve_csv(
    h: *const QbafxQbaf,
    cfg: QbafxSolverConfig,
    out: *mut *mut c_char,
) -> QbafxStatus {
    guard(|| {
        check_out(out)?;
        let outcome = solve_qe(handle(h)?, &solver(cfg)?)?;
        put_string(out, outcome.strengths.to_csv())
    })
}

/// Solves the framework and writes the strength of `argument` to `out`.
///
/// # Safety
/// `h` must be a live handle, `argument` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qbafx_strength(
    h: *const QbafxQbaf,
    cfg: QbafxSolverConfig,
    argument: *const c_char,
    out: *mut f64,
) -> QbafxStatus {
    guard(|| {
        check_out(out)?;
        let q = handle(h)?;
        let id = ArgumentId::new(text(argument)?).map_err(Failure::input)?;
        if !q.contains(&id) {
            return Err(Failure::input(format!("unknown argument {id}")));
        }
        let outcome = solve_qe(q, &solver(cfg)?)?;
        *out = outcome.strengths.get(&id).expect("solved every argument");
        Ok(())
    })
}

/// Attribution report for `topic` as CSV. `samples` and `seed` are used
/// only by `QBAFX_METHOD_SHAPLEY_SAMPLED`.
///
/// # Safety
/// `h` must be a live handle, `topic` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qbafx_explain_csv(
    h: *const QbafxQbaf,
    cfg: QbafxSolverConfig,
    topic: *const c_char,
    kind: QbafxKind,
    method: QbafxMethod,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> QbafxStatus {
    guard(|| {
        check_out(out)?;
        let q = handle(h)?;
        let topic = ArgumentId::new(text(topic)?).map_err(Failure::input)?;
        let kind = match kind {
            QbafxKind::Arguments => Kind::Arguments,
            QbafxKind::Relations => Kind::Relations,
        };
        let method = match method {
            QbafxMethod::Removal => Method::Removal,
            QbafxMethod::ShapleyExact => Method::ShapleyExact,
            QbafxMethod::ShapleySampled => Method::ShapleySampled { samples, seed },
        };
        let report = explain_all(q, &solver(cfg)?, &topic, kind, method)?;
        put_string(out, report.to_csv())
    })
}

/// Renders an attribution CSV (as produced by `qbafx_explain_csv`) over the
/// framework as Graphviz DOT.
///
/// # Safety
/// `h` must be a live handle, `report_csv` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qbafx_render_dot(
    h: *const QbafxQbaf,
    report_csv: *const c_char,
    negligible_threshold: f64,
    out: *mut *mut c_char,
) -> QbafxStatus {
    guard(|| {
        check_out(out)?;
        let q = handle(h)?;
        let report = AttributionReport::from_csv(text(report_csv)?, q).map_err(Failure::input)?;
        let spec = RenderSpec::new(negligible_threshold).map_err(Failure::input)?;
        put_string(out, render_dot(q, &report, &spec).map_err(Failure::input)?)
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qbafx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

//! C ABI over `rifs-core`.
//!
//! Step functions and spaces cross the boundary as opaque handles built from
//! JSON. Every function returns a [`RifsStatus`]; on failure the message is
//! available from [`rifs_last_error_message`] on the same thread. Strings
//! returned through out-pointers are owned by the caller and released with
//! [`rifs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rifs_core::deciders::check;
use rifs_core::error::Error;
use rifs_core::io::{parse_json, to_json};
use rifs_core::norms::{fundamental_function, SpaceHandle};
use rifs_core::rearrange::{default_hlp_tol, distribution, hlp_dominates, maximal_curve, rearrange};
use rifs_core::StepFunction;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RifsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    MalformedJson = 3,
    SchemaViolation = 4,
    DomainError = 5,
    AlphaMismatch = 6,
    DpViolation = 7,
    DivergentIntegral = 8,
    QuadratureCap = 9,
    NonConvergence = 10,
    HypothesisFailed = 11,
    IoError = 12,
    Panic = 13,
}

/// Opaque step function.
pub struct RifsStep(StepFunction);

/// Opaque normed space.
pub struct RifsSpace(SpaceHandle);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RifsStatus {
    match e.code() {
        "malformed_json" => RifsStatus::MalformedJson,
        "schema_violation" => RifsStatus::SchemaViolation,
        "alpha_mismatch" => RifsStatus::AlphaMismatch,
        "dp_violation" => RifsStatus::DpViolation,
        "divergent_integral" => RifsStatus::DivergentIntegral,
        "quadrature_cap" => RifsStatus::QuadratureCap,
        "non_convergence" => RifsStatus::NonConvergence,
        "hypothesis_failed" => RifsStatus::HypothesisFailed,
        "io_error" => RifsStatus::IoError,
        _ => RifsStatus::DomainError,
    }
}

enum Fail {
    Null,
    Utf8,
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RifsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RifsStatus::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument");
            RifsStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not valid UTF-8");
            RifsStatus::InvalidUtf8
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(&format!("{}: {e}", e.code()));
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            RifsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Utf8)?;
    put(out, c.into_raw())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rifs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rifs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a step function from JSON into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_step_from_json(json: *const c_char, out: *mut *mut RifsStep) -> RifsStatus {
    guard(|| {
        let f: StepFunction = parse_json(str_arg(json)?)?;
        put(out, Box::into_raw(Box::new(RifsStep(f))))
    })
}

/// # Safety
/// `step` must be NULL or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rifs_step_free(step: *mut RifsStep) {
    if !step.is_null() {
        drop(Box::from_raw(step));
    }
}

/// Canonical JSON of a step function.
///
/// # Safety
/// `step` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_step_to_json(step: *const RifsStep, out: *mut *mut c_char) -> RifsStatus {
    guard(|| put_string(out, to_json(&obj(step)?.0)))
}

/// Decreasing rearrangement as a new handle.
///
/// # Safety
/// `step` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_rearrange(step: *const RifsStep, out: *mut *mut RifsStep) -> RifsStatus {
    guard(|| {
        let r = rearrange(&obj(step)?.0);
        put(out, Box::into_raw(Box::new(RifsStep(r))))
    })
}

/// Measure of `{|x| > lambda}`.
///
/// # Safety
/// `step` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_distribution(step: *const RifsStep, lambda: f64, out: *mut f64) -> RifsStatus {
    guard(|| put(out, distribution(&obj(step)?.0, lambda)?))
}

/// `x**(t)`.
///
/// # Safety
/// `step` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_maximal_eval(step: *const RifsStep, t: f64, out: *mut f64) -> RifsStatus {
    guard(|| put(out, maximal_curve(&obj(step)?.0).eval(t)))
}

/// Whether `x ≺ y`. A negative `tol` selects the default tolerance.
///
/// # Safety
/// `x` and `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_hlp_dominates(
    x: *const RifsStep,
    y: *const RifsStep,
    tol: f64,
    out: *mut bool,
) -> RifsStatus {
    guard(|| {
        let (x, y) = (&obj(x)?.0, &obj(y)?.0);
        if x.alpha() != y.alpha() {
            return Err(Error::AlphaMismatch("x and y live on different domains".into()).into());
        }
        let tol = if tol < 0.0 { default_hlp_tol(y) } else { tol };
        put(out, hlp_dominates(x, y, tol))
    })
}

/// Parses a space description from JSON into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_space_from_json(json: *const c_char, out: *mut *mut RifsSpace) -> RifsStatus {
    guard(|| {
        let s = SpaceHandle::from_json(str_arg(json)?)?;
        put(out, Box::into_raw(Box::new(RifsSpace(s))))
    })
}

/// # Safety
/// `space` must be NULL or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rifs_space_free(space: *mut RifsSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// `‖x‖` in `space`.
///
/// # Safety
/// `space` and `step` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_norm(space: *const RifsSpace, step: *const RifsStep, out: *mut f64) -> RifsStatus {
    guard(|| put(out, obj(space)?.0.norm(&obj(step)?.0)?))
}

/// Fundamental function `φ(t)`.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_fundamental(space: *const RifsSpace, t: f64, out: *mut f64) -> RifsStatus {
    guard(|| put(out, fundamental_function(&obj(space)?.0, t)?))
}

/// Runs a named check (`reflexive`, `approx-compact`, `koc`, `embeds-l1`,
/// `rbp`, `delta2`) and returns the verdict as JSON.
///
/// # Safety
/// `name` must be a NUL-terminated string, `space` a live handle, and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rifs_check_json(
    name: *const c_char,
    space: *const RifsSpace,
    out: *mut *mut c_char,
) -> RifsStatus {
    guard(|| {
        let v = check(str_arg(name)?, &obj(space)?.0)?;
        put_string(out, to_json(&v))
    })
}

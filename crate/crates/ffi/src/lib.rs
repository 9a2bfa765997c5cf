//! C ABI over `albanese`: opaque curve handles, status codes, JSON results.
//!
//! Strings returned through out-pointers are owned by the caller and released with
//! [`albanese_string_free`]. The message of the last failure on the calling thread is
//! available from [`albanese_last_error`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use albanese::cli::{parse_basepoint, parse_curve, run_extend, run_hodge, run_periodmap, Format, JobConfig};
use albanese::exactalg::CurveModel;
use albanese::periods::BasepointKind;
use albanese::Error;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlbaneseStatus {
    Ok = 0,
    InvalidInput = 2,
    ComputationFailed = 3,
    PrecisionExhausted = 4,
    NullPointer = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

/// Opaque curve model with its basepoint.
pub struct AlbaneseCurve {
    model: Arc<CurveModel>,
    kind: BasepointKind,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: AlbaneseStatus, msg: String) -> AlbaneseStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> AlbaneseStatus {
    let status = match e.exit_code() {
        2 => AlbaneseStatus::InvalidInput,
        4 => AlbaneseStatus::PrecisionExhausted,
        _ => AlbaneseStatus::ComputationFailed,
    };
    fail(status, e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, AlbaneseStatus> {
    if p.is_null() {
        return Err(fail(AlbaneseStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(AlbaneseStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn guarded(f: impl FnOnce() -> AlbaneseStatus) -> AlbaneseStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(AlbaneseStatus::Panic, "panic inside albanese".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> AlbaneseStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            AlbaneseStatus::Ok
        }
        Err(e) => fail(AlbaneseStatus::ComputationFailed, e.to_string()),
    }
}

/// Parses `y^2 = f(x)` from a JSON list of coefficients, constant term first.
/// `genus <= 0` infers the genus from the degree. The basepoint starts as `"rational"`.
///
/// # Safety
/// `coeffs_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn albanese_curve_new(coeffs_json: *const c_char, genus: i32, out: *mut *mut AlbaneseCurve) -> AlbaneseStatus {
    guarded(|| {
        if out.is_null() {
            return fail(AlbaneseStatus::NullPointer, "out is null".into());
        }
        *out = ptr::null_mut();
        let spec = match read_str(coeffs_json, "coeffs_json") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let g = (genus > 0).then_some(genus as usize);
        match parse_curve(spec, g) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(AlbaneseCurve { model: Arc::new(model), kind: BasepointKind::Rational }));
                AlbaneseStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Sets the basepoint: `"rational"`, `"tangential"`, `"x=X"` or `"x=X,y=Y"` with rational `X`, `Y`.
///
/// # Safety
/// `curve` must come from [`albanese_curve_new`]; `spec` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn albanese_curve_set_basepoint(curve: *mut AlbaneseCurve, spec: *const c_char) -> AlbaneseStatus {
    guarded(|| {
        let Some(c) = curve.as_mut() else {
            return fail(AlbaneseStatus::NullPointer, "curve is null".into());
        };
        let spec = match read_str(spec, "spec") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let (kind, point) = match parse_basepoint(spec) {
            Ok(v) => v,
            Err(e) => return from_error(e),
        };
        if let Some(p) = point {
            match (*c.model).clone().with_basepoint(p) {
                Ok(m) => c.model = Arc::new(m),
                Err(e) => return from_error(e),
            }
        }
        c.kind = kind;
        AlbaneseStatus::Ok
    })
}

/// Genus of the curve, or `-1` for a null handle.
///
/// # Safety
/// `curve` must be null or come from [`albanese_curve_new`].
#[no_mangle]
pub unsafe extern "C" fn albanese_curve_genus(curve: *const AlbaneseCurve) -> i32 {
    curve.as_ref().map_or(-1, |c| c.model.genus() as i32)
}

/// Releases a curve handle; null is ignored.
///
/// # Safety
/// `curve` must be null or come from [`albanese_curve_new`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn albanese_curve_free(curve: *mut AlbaneseCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

type Job = fn(&JobConfig) -> albanese::Result<String>;

unsafe fn run_job(curve: *const AlbaneseCurve, level: u32, out: *mut *mut c_char, job: Job) -> AlbaneseStatus {
    guarded(|| {
        if out.is_null() {
            return fail(AlbaneseStatus::NullPointer, "out is null".into());
        }
        *out = ptr::null_mut();
        let Some(c) = curve.as_ref() else {
            return fail(AlbaneseStatus::NullPointer, "curve is null".into());
        };
        if level == 0 {
            return fail(AlbaneseStatus::InvalidInput, "level must be at least 1".into());
        }
        let cfg = JobConfig { curve: c.model.clone(), kind: c.kind, level, format: Format::Json };
        match job(&cfg) {
            Ok(s) => write_string(out, s),
            Err(e) => from_error(e),
        }
    })
}

/// Logarithmic extension to `level` as JSON (same document as `albanese extend`).
///
/// # Safety
/// `curve` must come from [`albanese_curve_new`]; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn albanese_extend_json(curve: *const AlbaneseCurve, level: u32, out: *mut *mut c_char) -> AlbaneseStatus {
    run_job(curve, level, out, run_extend)
}

/// F^0 generators to `level` as JSON (same document as `albanese hodge`).
///
/// # Safety
/// `curve` must come from [`albanese_curve_new`]; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn albanese_hodge_json(curve: *const AlbaneseCurve, level: u32, out: *mut *mut c_char) -> AlbaneseStatus {
    run_job(curve, level, out, run_hodge)
}

/// Period map to `level` as JSON (same document as `albanese periodmap`).
///
/// # Safety
/// `curve` must come from [`albanese_curve_new`]; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn albanese_periodmap_json(curve: *const AlbaneseCurve, level: u32, out: *mut *mut c_char) -> AlbaneseStatus {
    run_job(curve, level, out, run_periodmap)
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn albanese_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn albanese_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

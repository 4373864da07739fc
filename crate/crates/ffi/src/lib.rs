//! C ABI for the `sasaki` curvature engine.
//!
//! Every fallible call returns a [`SasakiStatus`]; on failure the message is
//! available from [`sasaki_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sasaki::algebra::{FiberVec, TangentVec};
use sasaki::document::ModelDocument;
use sasaki::report::{build_report, ReportOptions};
use sasaki::sphere_bundle::{BundlePoint, PlaneSpec, TangentDir};
use sasaki::verify::{run_suite, VerifyOptions};
use sasaki::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SasakiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Io = 4,
    InvalidInput = 5,
    Unsupported = 6,
    Degenerate = 7,
    Panic = 8,
}

/// Opaque handle to a parsed model evaluated at its point.
pub struct SasakiModel {
    document: ModelDocument,
    point: BundlePoint<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(err: &Error) -> SasakiStatus {
    match err {
        Error::Parse { .. } => SasakiStatus::Parse,
        Error::Io(_) => SasakiStatus::Io,
        Error::Unsupported(_) | Error::MissingDerivativeData(_) | Error::MissingConstant(_) => {
            SasakiStatus::Unsupported
        }
        Error::DegeneratePlane | Error::RankDeficient { .. } => SasakiStatus::Degenerate,
        _ => SasakiStatus::InvalidInput,
    }
}

fn fail(err: Error) -> SasakiStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(what: &str) -> SasakiStatus {
    set_error(format!("null pointer: {what}"));
    SasakiStatus::NullPointer
}

/// Runs `body`, turning a panic into [`SasakiStatus::Panic`].
fn guarded(body: impl FnOnce() -> SasakiStatus) -> SasakiStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {message}"));
            SasakiStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, SasakiStatus> {
    if text.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        SasakiStatus::InvalidUtf8
    })
}

fn into_handle(document: ModelDocument, out: *mut *mut SasakiModel) -> SasakiStatus {
    match document.build::<f64>().and_then(|model| model.point()) {
        Ok(point) => {
            unsafe { *out = Box::into_raw(Box::new(SasakiModel { document, point })) };
            SasakiStatus::Ok
        }
        Err(e) => fail(e),
    }
}

fn write_string(text: String, out: *mut *mut c_char) -> SasakiStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            SasakiStatus::Ok
        }
        Err(_) => {
            set_error("output contains a nul byte".into());
            SasakiStatus::InvalidInput
        }
    }
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn sasaki_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a TOML model document. On success `*out` owns a handle to free with [`sasaki_model_free`].
///
/// # Safety
/// `source` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sasaki_model_parse(source: *const c_char, out: *mut *mut SasakiModel) -> SasakiStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let text = match read_str(source, "source") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match ModelDocument::parse(text) {
            Ok(doc) => into_handle(doc, out),
            Err(e) => fail(e),
        }
    })
}

/// Reads and parses a model document from a file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sasaki_model_open(path: *const c_char, out: *mut *mut SasakiModel) -> SasakiStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        let path = match read_str(path, "path") {
            Ok(p) => p,
            Err(status) => return status,
        };
        match ModelDocument::from_path(Path::new(path)) {
            Ok(doc) => into_handle(doc, out),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sasaki_model_free(model: *mut SasakiModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Base dimension and fiber rank.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sasaki_model_dims(
    model: *const SasakiModel,
    base_dim: *mut usize,
    fiber_rank: *mut usize,
) -> SasakiStatus {
    let Some(model) = model.as_ref() else { return null("model") };
    if base_dim.is_null() || fiber_rank.is_null() {
        return null("output");
    }
    *base_dim = model.point.n;
    *fiber_rank = model.point.m;
    SasakiStatus::Ok
}

/// Scalar curvature at the model's point.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sasaki_model_scalar_curvature(model: *const SasakiModel, out: *mut f64) -> SasakiStatus {
    let Some(model) = model.as_ref() else { return null("model") };
    if out.is_null() {
        return null("out");
    }
    *out = model.point.scalar();
    SasakiStatus::Ok
}

/// Sectional curvature of the plane spanned by two tangent vectors, each given as
/// `len = base_dim + fiber_rank` coordinates (horizontal part first).
///
/// # Safety
/// `first` and `second` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sasaki_model_sectional(
    model: *const SasakiModel,
    first: *const f64,
    second: *const f64,
    len: usize,
    out: *mut f64,
) -> SasakiStatus {
    guarded(|| {
        let Some(model) = model.as_ref() else { return null("model") };
        if first.is_null() || second.is_null() || out.is_null() {
            return null("vector or output");
        }
        let (n, m) = (model.point.n, model.point.m);
        if len != n + m {
            return fail(Error::DimensionMismatch { expected: n + m, got: len });
        }
        let direction = |p: *const f64| {
            let coords = std::slice::from_raw_parts(p, len);
            TangentDir::new(TangentVec::new(coords[..n].to_vec()), FiberVec::new(coords[n..].to_vec()))
        };
        match model.point.sectional(&PlaneSpec::new(direction(first), direction(second))) {
            Ok(k) => {
                *out = k;
                SasakiStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Full curvature report as JSON. Free the string with [`sasaki_string_free`].
///
/// # Safety
/// `model` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sasaki_model_report_json(
    model: *const SasakiModel,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> SasakiStatus {
    guarded(|| {
        let Some(model) = model.as_ref() else { return null("model") };
        if out.is_null() {
            return null("out");
        }
        let options = ReportOptions { samples, seed, tolerance: None, timing: false };
        match build_report(&model.document, &options) {
            Ok(report) => write_string(report.to_json(), out),
            Err(e) => fail(e),
        }
    })
}

/// Runs a property suite by name (or `all`). `*passed` is 1 when every check passes.
///
/// # Safety
/// `suite` must be a nul-terminated string and `passed` valid.
#[no_mangle]
pub unsafe extern "C" fn sasaki_verify(suite: *const c_char, seed: u64, passed: *mut i32) -> SasakiStatus {
    guarded(|| {
        if passed.is_null() {
            return null("passed");
        }
        let suite = match read_str(suite, "suite") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let options = VerifyOptions { seed: Some(seed), ..VerifyOptions::default() };
        match run_suite(suite, &options) {
            Ok(outcome) => {
                *passed = i32::from(outcome.passed());
                SasakiStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `text` must come from this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sasaki_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

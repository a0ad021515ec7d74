//! C ABI over `cuspforge`.
//!
//! Configurations cross the boundary as opaque handles; everything else is
//! JSON text in the same schema the CLI reads and writes. Every call returns a
//! [`CfStatus`]; on failure the message is available from
//! [`cf_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cuspforge::format;
use cuspforge::geometry::Configuration;
use cuspforge::isogeny::DiagonalIsogeny;
use cuspforge::{catalog, Error, QuadInt};

/// Result codes. The numeric values match the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    InvalidInput = 1,
    NotProportional = 2,
    Internal = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Opaque configuration handle. Release with [`cf_configuration_free`].
pub struct CfConfiguration {
    inner: Configuration,
}

/// Summary of the singular locus of a configuration.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CfSingularSummary {
    pub components: usize,
    pub singular_points: usize,
    pub incidence_sum: usize,
    pub proportional: bool,
    pub vacuous: bool,
    pub intersecting: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::Internal(_) | Error::DegenerateLattice(_) | Error::DegenerateIntersection(_) => {
            CfStatus::Internal
        }
        _ => CfStatus::InvalidInput,
    }
}

struct Fail(CfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside cuspforge".into());
            CfStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CfStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const CfConfiguration) -> Result<&'a Configuration, Fail> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Fail(CfStatus::NullPointer, "configuration handle is null".into()))
}

fn check_out<T>(out: *mut T) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(CfStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn boxed(c: Configuration) -> *mut CfConfiguration {
    Box::into_raw(Box::new(CfConfiguration { inner: c }))
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(CfStatus::Internal, "output contains a NUL byte".into()))
}

/// Message of the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a configuration from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_configuration_from_json(
    json: *const c_char,
    out: *mut *mut CfConfiguration,
) -> CfStatus {
    guard(|| {
        check_out(out)?;
        let s = read_str(json, "json")?;
        let c = format::parse_configuration(s)?;
        *out = boxed(c);
        Ok(())
    })
}

/// Looks up a catalog entry (`hirzebruch`, `d14`, `holzapfel`).
///
/// # Safety
/// `key` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_configuration_catalog(
    key: *const c_char,
    out: *mut *mut CfConfiguration,
) -> CfStatus {
    guard(|| {
        check_out(out)?;
        let k = read_str(key, "key")?;
        *out = boxed(catalog::lookup(k)?.configuration);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `c` must be null or a handle returned by this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn cf_configuration_free(c: *mut CfConfiguration) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of curves in the configuration, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_configuration_len(c: *const CfConfiguration) -> usize {
    c.as_ref().map_or(0, |h| h.inner.len())
}

/// Serializes a configuration in canonical curve order. Free the result with [`cf_string_free`].
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_configuration_to_json(
    c: *const CfConfiguration,
    out: *mut *mut c_char,
) -> CfStatus {
    guard(|| {
        check_out(out)?;
        let d = handle(c)?;
        *out = c_string(format::configuration_to_string(d))?;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computes the singular locus. Non-proportional configurations still fill `out`.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_singular_locus(
    c: *const CfConfiguration,
    out: *mut CfSingularSummary,
) -> CfStatus {
    guard(|| {
        check_out(out)?;
        let r = handle(c)?.singular_locus()?;
        *out = CfSingularSummary {
            components: r.components,
            singular_points: r.singular_count,
            incidence_sum: r.incidence_sum,
            proportional: r.proportional,
            vacuous: r.vacuous,
            intersecting: r.intersecting,
        };
        Ok(())
    })
}

/// Full singular-locus report as JSON. Free the result with [`cf_string_free`].
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_singular_locus_json(
    c: *const CfConfiguration,
    out: *mut *mut c_char,
) -> CfStatus {
    guard(|| {
        check_out(out)?;
        let r = handle(c)?.singular_locus()?;
        let s = serde_json::to_string(&format::report_json(&r))
            .map_err(|e| Fail(CfStatus::Internal, e.to_string()))?;
        *out = c_string(s)?;
        Ok(())
    })
}

/// Pulls a proportional configuration back along `diag(alpha, beta)` onto `E_{m1} x E_{m2}`.
/// `alpha` and `beta` are literals such as `"1+2w"`.
///
/// # Safety
/// `c` must be a live handle, the strings NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_pullback(
    c: *const CfConfiguration,
    alpha: *const c_char,
    beta: *const c_char,
    m1: u64,
    m2: u64,
    out: *mut *mut CfConfiguration,
) -> CfStatus {
    guard(|| {
        check_out(out)?;
        let d = handle(c)?;
        let tag = d.ambient().tag();
        let a = QuadInt::parse(tag, read_str(alpha, "alpha")?)?;
        let b = QuadInt::parse(tag, read_str(beta, "beta")?)?;
        let mu = DiagonalIsogeny::new(a, b, m1, m2)?;
        if !d.singular_locus()?.proportional {
            return Err(Fail(
                CfStatus::NotProportional,
                "the input configuration is not proportional".into(),
            ));
        }
        *out = boxed(mu.pullback_configuration(d)?);
        Ok(())
    })
}

/// Runs a series recipe (JSON) and returns `{"base": record, "terms": [record, ...]}`.
/// Free the result with [`cf_string_free`].
///
/// # Safety
/// `recipe` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_series_json(recipe: *const c_char, out: *mut *mut c_char) -> CfStatus {
    guard(|| {
        check_out(out)?;
        let v: serde_json::Value = serde_json::from_str(read_str(recipe, "recipe")?)
            .map_err(|e| Fail(CfStatus::InvalidInput, format!("parse error: {e}")))?;
        let series = format::run_recipe(&format::parse_recipe(&v)?)?;
        let s = serde_json::to_string(&format::series_json(&series))
            .map_err(|e| Fail(CfStatus::Internal, e.to_string()))?;
        *out = c_string(s)?;
        Ok(())
    })
}

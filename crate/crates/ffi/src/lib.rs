//! C interface to `fquad-core`.
//!
//! Spaces, spans and cospans cross the boundary as opaque handles created by
//! the `*_parse` and operation functions and released with the matching
//! `*_free`. Every fallible call returns an [`FqStatus`]; on failure the
//! message is available from [`fq_last_error`] until the next call on the
//! same thread. Strings returned through `char **` are owned by the caller
//! and released with [`fq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use fquad_core::cospancat::{compose_cospans, sigma, sigma_lift, Cospan};
use fquad_core::isofunc::hom_iso_dim;
use fquad_core::qmorph::count_homs;
use fquad_core::quadform::QuadSpace;
use fquad_core::spancat::{compose_spans, SpanMorphism};
use fquad_core::text;
use fquad_core::verify::{find_suite, run_suite, VerifyConfig};
use fquad_core::{Error, Limits};

/// Result codes. The numeric values are stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BoundExceeded = 4,
    Invalid = 5,
    UnknownSuite = 6,
    Violation = 7,
}

/// A quadratic space.
pub struct FqSpace {
    inner: QuadSpace,
}

/// A morphism of the span category.
pub struct FqSpan {
    inner: SpanMorphism,
}

/// A cospan between non-degenerate spaces.
pub struct FqCospan {
    inner: Cospan,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: &Error) -> FqStatus {
    set_error(&e.to_string());
    match e {
        Error::Parse(_) => FqStatus::Parse,
        Error::BoundExceeded { .. } => FqStatus::BoundExceeded,
        _ => FqStatus::Invalid,
    }
}

fn null() -> FqStatus {
    set_error("null pointer argument");
    FqStatus::NullPointer
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, FqStatus> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        FqStatus::InvalidUtf8
    })
}

fn limits(bound: usize) -> Limits {
    if bound == 0 {
        Limits::default()
    } else {
        Limits::with_bound(bound)
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> FqStatus {
    *out = Box::into_raw(Box::new(value));
    FqStatus::Ok
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FqStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FqStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            FqStatus::Invalid
        }
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message of the last failure on this thread; empty if none. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a space from an inline descriptor such as `H0+x1` or from the
/// text file format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_space_parse(text: *const c_char, out: *mut *mut FqSpace) -> FqStatus {
    let text = try_ffi!(str_arg(text));
    if out.is_null() {
        return null();
    }
    match text::parse_space_any(text) {
        Ok(inner) => put(out, FqSpace { inner }),
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `space` must be null or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fq_space_free(space: *mut FqSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Dimension of the space, or 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fq_space_dim(space: *const FqSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.dim())
}

/// Writes the canonical class string, e.g. `H1+H0+x0`.
///
/// # Safety
/// `space` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_space_class(space: *const FqSpace, out: *mut *mut c_char) -> FqStatus {
    match (space.as_ref(), out.is_null()) {
        (Some(s), false) => put_string(out, s.inner.iso_class().to_string()),
        _ => null(),
    }
}

/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_space_isometric(
    a: *const FqSpace,
    b: *const FqSpace,
    out: *mut bool,
) -> FqStatus {
    match (a.as_ref(), b.as_ref(), out.is_null()) {
        (Some(a), Some(b), false) => {
            *out = a.inner.is_isometric(&b.inner);
            FqStatus::Ok
        }
        _ => null(),
    }
}

/// `|Hom(v, w)|`. A `bound` of 0 selects the default enumeration bound.
///
/// # Safety
/// `v`, `w` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_count_homs(
    v: *const FqSpace,
    w: *const FqSpace,
    bound: usize,
    out: *mut usize,
) -> FqStatus {
    match (v.as_ref(), w.as_ref(), out.is_null()) {
        (Some(v), Some(w), false) => match count_homs(&v.inner, &w.inner, &limits(bound)) {
            Ok(n) => {
                *out = n;
                FqStatus::Ok
            }
            Err(e) => fail(&e),
        },
        _ => null(),
    }
}

/// `dim Hom(iso_v, iso_w)`. A `bound` of 0 selects the default bound.
///
/// # Safety
/// `v`, `w` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_hom_iso_dim(
    v: *const FqSpace,
    w: *const FqSpace,
    bound: usize,
    out: *mut usize,
) -> FqStatus {
    match (v.as_ref(), w.as_ref(), out.is_null()) {
        (Some(v), Some(w), false) => match hom_iso_dim(&v.inner, &w.inner, &limits(bound)) {
            Ok(n) => {
                *out = n;
                FqStatus::Ok
            }
            Err(e) => fail(&e),
        },
        _ => null(),
    }
}

/// Parses a span in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_span_parse(text: *const c_char, out: *mut *mut FqSpan) -> FqStatus {
    let text = try_ffi!(str_arg(text));
    if out.is_null() {
        return null();
    }
    match text::parse_span(text) {
        Ok(inner) => put(out, FqSpan { inner }),
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `span` must be null or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fq_span_free(span: *mut FqSpan) {
    if !span.is_null() {
        drop(Box::from_raw(span));
    }
}

/// # Safety
/// `span` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_span_format(span: *const FqSpan, out: *mut *mut c_char) -> FqStatus {
    match (span.as_ref(), out.is_null()) {
        (Some(s), false) => put_string(out, text::format_span(&s.inner)),
        _ => null(),
    }
}

/// `second ∘ first`.
///
/// # Safety
/// `first`, `second` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_span_compose(
    first: *const FqSpan,
    second: *const FqSpan,
    out: *mut *mut FqSpan,
) -> FqStatus {
    match (first.as_ref(), second.as_ref(), out.is_null()) {
        (Some(a), Some(b), false) => match compose_spans(&a.inner, &b.inner) {
            Ok(inner) => put(out, FqSpan { inner }),
            Err(e) => fail(&e),
        },
        _ => null(),
    }
}

/// A cospan whose pullback span is `span`; both ends must be non-degenerate.
///
/// # Safety
/// `span` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_span_sigma_lift(
    span: *const FqSpan,
    out: *mut *mut FqCospan,
) -> FqStatus {
    match (span.as_ref(), out.is_null()) {
        (Some(s), false) => match sigma_lift(&s.inner) {
            Ok(inner) => put(out, FqCospan { inner }),
            Err(e) => fail(&e),
        },
        _ => null(),
    }
}

/// Parses a cospan in the text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_cospan_parse(text: *const c_char, out: *mut *mut FqCospan) -> FqStatus {
    let text = try_ffi!(str_arg(text));
    if out.is_null() {
        return null();
    }
    match text::parse_cospan(text) {
        Ok(inner) => put(out, FqCospan { inner }),
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `cospan` must be null or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fq_cospan_free(cospan: *mut FqCospan) {
    if !cospan.is_null() {
        drop(Box::from_raw(cospan));
    }
}

/// # Safety
/// `cospan` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_cospan_format(
    cospan: *const FqCospan,
    out: *mut *mut c_char,
) -> FqStatus {
    match (cospan.as_ref(), out.is_null()) {
        (Some(t), false) => put_string(out, text::format_cospan(&t.inner)),
        _ => null(),
    }
}

/// `second ∘ first`, through the pseudo push-out.
///
/// # Safety
/// `first`, `second` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_cospan_compose(
    first: *const FqCospan,
    second: *const FqCospan,
    out: *mut *mut FqCospan,
) -> FqStatus {
    match (first.as_ref(), second.as_ref(), out.is_null()) {
        (Some(a), Some(b), false) => match compose_cospans(&a.inner, &b.inner) {
            Ok(inner) => put(out, FqCospan { inner }),
            Err(e) => fail(&e),
        },
        _ => null(),
    }
}

/// The pullback span `σ(cospan)`.
///
/// # Safety
/// `cospan` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fq_cospan_sigma(
    cospan: *const FqCospan,
    out: *mut *mut FqSpan,
) -> FqStatus {
    match (cospan.as_ref(), out.is_null()) {
        (Some(t), false) => put(
            out,
            FqSpan {
                inner: sigma(&t.inner),
            },
        ),
        _ => null(),
    }
}

/// Runs one verification suite. Returns `FQ_STATUS_VIOLATION` when a case
/// fails; `failures` (may be null) receives the number of failing cases.
///
/// # Safety
/// `name` must be a NUL-terminated string; `failures` null or valid.
#[no_mangle]
pub unsafe extern "C" fn fq_verify_suite(
    name: *const c_char,
    seed: u64,
    failures: *mut usize,
) -> FqStatus {
    let name = try_ffi!(str_arg(name));
    let Some(suite) = find_suite(name) else {
        set_error(&format!("unknown suite `{name}`"));
        return FqStatus::UnknownSuite;
    };
    let outcome = run_suite(
        suite,
        &VerifyConfig {
            seed,
            limits: Limits::default(),
        },
    );
    if !failures.is_null() {
        *failures = outcome.failures();
    }
    if let Some(e) = &outcome.error {
        return fail(e);
    }
    if outcome.passed() {
        FqStatus::Ok
    } else {
        set_error(&outcome.summary_line());
        FqStatus::Violation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut out = ptr::null_mut();
            assert_eq!(fq_space_parse(ptr::null(), &mut out), FqStatus::NullPointer);
            assert!(out.is_null());
            assert_eq!(fq_space_dim(ptr::null()), 0);
            fq_space_free(ptr::null_mut());
            fq_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn parse_errors_set_the_message() {
        unsafe {
            let mut out = ptr::null_mut();
            let status = fq_space_parse(c"H9".as_ptr(), &mut out);
            assert_eq!(status, FqStatus::Parse);
            let msg = CStr::from_ptr(fq_last_error()).to_str().unwrap();
            assert!(msg.contains("H9"), "{msg}");
        }
    }
}

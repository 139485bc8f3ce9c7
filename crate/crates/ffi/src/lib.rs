//! C ABI over `goldman-core`.
//!
//! Surfaces are opaque `GoldmanSurface` handles owned by the caller and
//! released with `goldman_surface_free`. Every function returns a
//! `GoldmanStatus`; results come back through out-pointers. Strings returned
//! by the library are NUL-terminated UTF-8 and must be released with
//! `goldman_string_free`. After a non-OK status, `goldman_last_error_message`
//! describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use goldman_core::goldman::{geometric_intersection_number, goldman_bracket, term_count};
use goldman_core::surface::{holed_torus, pants};
use goldman_core::{Error, SurfaceRep, Word};

/// Status codes; the numeric values of the first four match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoldmanStatus {
    Ok = 0,
    InvalidInput = 2,
    NoStabilization = 3,
    Numerical = 4,
    NullPointer = 6,
    Panic = 7,
}

/// Opaque surface handle.
pub struct GoldmanSurface {
    rep: SurfaceRep,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GoldmanStatus {
    match e.exit_code() {
        3 => GoldmanStatus::NoStabilization,
        4 => GoldmanStatus::Numerical,
        _ => GoldmanStatus::InvalidInput,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GoldmanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GoldmanStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer passed as {what}"));
            GoldmanStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            GoldmanStatus::Panic
        }
    }
}

unsafe fn surface_ref<'a>(s: *const GoldmanSurface) -> Result<&'a SurfaceRep, Failure> {
    s.as_ref().map(|h| &h.rep).ok_or(Failure::Null("surface"))
}

unsafe fn word_arg(p: *const c_char, what: &'static str) -> Result<Word, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    let text = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::InvalidInput(format!("{what} is not UTF-8")))?;
    Ok(text.parse::<Word>()?)
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn into_handle(rep: SurfaceRep) -> *mut GoldmanSurface {
    Box::into_raw(Box::new(GoldmanSurface { rep }))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    Ok(CString::new(s).map_err(|_| Error::InvalidInput("interior NUL in output".into()))?.into_raw())
}

/// One-holed torus with simple curve length `length` and twist `twist`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn goldman_surface_holed_torus(length: f64, twist: f64, out: *mut *mut GoldmanSurface) -> GoldmanStatus {
    guard(|| put(out, into_handle(holed_torus(length, twist)?), "out"))
}

/// Pair of pants with boundary lengths `l1`, `l2`, `l3`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn goldman_surface_pants(l1: f64, l2: f64, l3: f64, out: *mut *mut GoldmanSurface) -> GoldmanStatus {
    guard(|| put(out, into_handle(pants(l1, l2, l3)?), "out"))
}

/// Loads a surface from the JSON surface file format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn goldman_surface_from_json(json: *const c_char, out: *mut *mut GoldmanSurface) -> GoldmanStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| Error::InvalidInput("json is not UTF-8".into()))?;
        put(out, into_handle(SurfaceRep::from_json(text)?), "out")
    })
}

/// Serializes a surface; free the result with `goldman_string_free`.
///
/// # Safety
/// `surface` must be a live handle; `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn goldman_surface_to_json(surface: *const GoldmanSurface, out: *mut *mut c_char) -> GoldmanStatus {
    guard(|| {
        let rep = surface_ref(surface)?;
        put(out, into_c_string(rep.to_json())?, "out")
    })
}

/// New handle for the surface twisted by `s` along its distinguished curve.
///
/// # Safety
/// `surface` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn goldman_surface_twist(surface: *const GoldmanSurface, s: f64, out: *mut *mut GoldmanSurface) -> GoldmanStatus {
    guard(|| {
        let rep = surface_ref(surface)?;
        put(out, into_handle(rep.twist_rep(s)?), "out")
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `surface` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn goldman_surface_free(surface: *mut GoldmanSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Length of the closed geodesic in the class of `word`.
///
/// # Safety
/// `surface` must be a live handle, `word` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn goldman_class_length(surface: *const GoldmanSurface, word: *const c_char, out: *mut f64) -> GoldmanStatus {
    guard(|| {
        let rep = surface_ref(surface)?;
        let w = word_arg(word, "word")?;
        put(out, rep.class_length(&w)?, "out")
    })
}

/// Number of crossings of the closed geodesics of `x` and `y`.
/// `radius_cap` 0 selects the default.
///
/// # Safety
/// `surface` must be a live handle, `x` and `y` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn goldman_intersection_number(
    surface: *const GoldmanSurface,
    x: *const c_char,
    y: *const c_char,
    radius_cap: usize,
    out: *mut usize,
) -> GoldmanStatus {
    guard(|| {
        let rep = surface_ref(surface)?;
        let (x, y) = (word_arg(x, "x")?, word_arg(y, "y")?);
        put(out, geometric_intersection_number(rep, &x, &y, cap(radius_cap))?, "out")
    })
}

fn cap(radius_cap: usize) -> usize {
    if radius_cap == 0 {
        goldman_core::goldman::DEFAULT_RADIUS_CAP
    } else {
        radius_cap
    }
}

/// The bracket as JSON `{"sum": [{"class", "coeff"}], "i", "terms_with_multiplicity", "radius_used",
/// "coincident_crossings"}`.
/// Free the result with `goldman_string_free`.
///
/// # Safety
/// `surface` must be a live handle, `x` and `y` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn goldman_bracket_json(
    surface: *const GoldmanSurface,
    x: *const c_char,
    y: *const c_char,
    radius_cap: usize,
    out: *mut *mut c_char,
) -> GoldmanStatus {
    guard(|| {
        let rep = surface_ref(surface)?;
        let (x, y) = (word_arg(x, "x")?, word_arg(y, "y")?);
        let bs = goldman_bracket(rep, &x, &y, cap(radius_cap))?;
        let sum: Vec<_> = bs
            .terms
            .iter()
            .map(|(k, v)| serde_json::json!({ "class": k.to_string(), "coeff": v }))
            .collect();
        let doc = serde_json::json!({
            "sum": sum,
            "i": bs.records.len(),
            "terms_with_multiplicity": term_count(&bs),
            "radius_used": bs.radius_used,
            "coincident_crossings": bs.coincident_crossings,
        });
        put(out, into_c_string(doc.to_string())?, "out")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn goldman_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, empty after success. The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn goldman_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

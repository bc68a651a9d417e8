//! C ABI over `biharp`.
//!
//! Objects are opaque heap handles released with the matching `*_free`
//! function. Every call returns a [`BiharpStatus`]; on failure the message
//! is available from [`biharp_last_error`] until the next failing call on
//! the same thread. Outputs are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use biharp::atomic::classify_at;
use biharp::haar::hp_norm_at;
use biharp::io::{decomposition_to_json, expansion_from_json, weights_to_json};
use biharp::pietsch::domination_check;
use biharp::{
    pietsch_weights, AtomicDecomposition, DyadicRectangle, Error, HaarExpansion, MultiplierSequence, Normalization,
    PietschWeights,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiharpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Resolution = 3,
    Domain = 4,
    Degenerate = 5,
    Precondition = 6,
    Config = 7,
    Violation = 8,
    Io = 9,
    Json = 10,
    OutOfRange = 11,
    Panic = 12,
}

impl From<&Error> for BiharpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Resolution(_) => BiharpStatus::Resolution,
            Error::Domain(_) => BiharpStatus::Domain,
            Error::Degenerate(_) => BiharpStatus::Degenerate,
            Error::Precondition(_) => BiharpStatus::Precondition,
            Error::Config(_) => BiharpStatus::Config,
            Error::Violation { .. } => BiharpStatus::Violation,
            Error::Io(_) => BiharpStatus::Io,
            Error::Json(_) => BiharpStatus::Json,
        }
    }
}

/// A finite Haar expansion.
pub struct BiharpExpansion(HaarExpansion);

/// An atomic decomposition.
pub struct BiharpDecomposition(AtomicDecomposition);

/// A set of Pietsch weights.
pub struct BiharpWeights(PietschWeights);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(BiharpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BiharpStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> BiharpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BiharpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BiharpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failing call on this thread, or null. Owned by the
/// library; valid until the next failing call.
#[no_mangle]
pub extern "C" fn biharp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn biharp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the expansion JSON schema `{"maxLevel", "coeffs": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_expansion_from_json(json: *const c_char, out: *mut *mut BiharpExpansion) -> BiharpStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(BiharpStatus::InvalidUtf8, e.to_string()))?;
        let f = expansion_from_json(text)?;
        write(out, boxed(BiharpExpansion(f)))
    })
}

/// Builds an expansion from parallel arrays of side levels, indices and
/// values. Repeated rectangles are summed.
///
/// # Safety
/// Each array must hold `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_expansion_from_arrays(
    max_level: u32,
    len: usize,
    i_level: *const u32,
    i_index: *const u64,
    j_level: *const u32,
    j_index: *const u64,
    values: *const f64,
    out: *mut *mut BiharpExpansion,
) -> BiharpStatus {
    guard(|| {
        let (a, k) = (slice(i_level, len, "i_level")?, slice(i_index, len, "i_index")?);
        let (b, l) = (slice(j_level, len, "j_level")?, slice(j_index, len, "j_index")?);
        let v = slice(values, len, "values")?;
        let coeffs = (0..len)
            .map(|t| Ok((DyadicRectangle::from_parts(a[t], k[t], b[t], l[t])?, v[t])))
            .collect::<Result<Vec<_>, Error>>()?;
        let f = HaarExpansion::from_coeffs(max_level, coeffs)?;
        write(out, boxed(BiharpExpansion(f)))
    })
}

/// # Safety
/// `h` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn biharp_expansion_free(h: *mut BiharpExpansion) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of nonzero coefficients.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_expansion_support_len(h: *const BiharpExpansion, out: *mut usize) -> BiharpStatus {
    guard(|| write(out, deref(h, "expansion")?.0.support_len()))
}

/// `‖f‖_{H^p}` on the grid `2^grid x 2^grid`; `grid = 0` selects `L + 1`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_hp_norm(h: *const BiharpExpansion, p: f64, grid: u32, out: *mut f64) -> BiharpStatus {
    guard(|| {
        let f = &deref(h, "expansion")?.0;
        let g = if grid == 0 { f.default_resolution() } else { grid };
        write(out, hp_norm_at(f, p, g)?)
    })
}

/// Atomic decomposition at exponent `p`; `grid = 0` selects `L + 1`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_decompose(
    h: *const BiharpExpansion,
    p: f64,
    grid: u32,
    out: *mut *mut BiharpDecomposition,
) -> BiharpStatus {
    guard(|| {
        let f = &deref(h, "expansion")?.0;
        let g = if grid == 0 { f.default_resolution() } else { grid };
        let dec = classify_at(f, p, g)?;
        write(out, boxed(BiharpDecomposition(dec)))
    })
}

/// # Safety
/// `d` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn biharp_decomposition_free(d: *mut BiharpDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// `B = Σ_n |R_n^*|^(1-p/2) ‖f_n‖_2^p`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_decomposition_b(d: *const BiharpDecomposition, out: *mut f64) -> BiharpStatus {
    guard(|| write(out, deref(d, "decomposition")?.0.b()))
}

/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_decomposition_norm(d: *const BiharpDecomposition, out: *mut f64) -> BiharpStatus {
    guard(|| write(out, deref(d, "decomposition")?.0.norm()))
}

/// Number of nonempty levels `R_n`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_decomposition_level_count(d: *const BiharpDecomposition, out: *mut usize) -> BiharpStatus {
    guard(|| write(out, deref(d, "decomposition")?.0.levels().len()))
}

/// JSON export; free the result with [`biharp_string_free`].
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_decomposition_to_json(d: *const BiharpDecomposition, out: *mut *mut c_char) -> BiharpStatus {
    guard(|| {
        let s = decomposition_to_json(&deref(d, "decomposition")?.0)?;
        write(out, CString::new(s).unwrap_or_default().into_raw())
    })
}

/// B-normalized Pietsch weights of `h` for the decomposition `d` of `h`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_weights_new(
    h: *const BiharpExpansion,
    d: *const BiharpDecomposition,
    out: *mut *mut BiharpWeights,
) -> BiharpStatus {
    guard(|| {
        let w = pietsch_weights(&deref(h, "expansion")?.0, &deref(d, "decomposition")?.0, Normalization::B)?;
        write(out, boxed(BiharpWeights(w)))
    })
}

/// # Safety
/// `w` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn biharp_weights_free(w: *mut BiharpWeights) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_weights_len(w: *const BiharpWeights, out: *mut usize) -> BiharpStatus {
    guard(|| write(out, deref(w, "weights")?.0.len()))
}

/// Entry `index` in rectangle order: side levels, indices and `ω`.
///
/// # Safety
/// `w` must be a live handle; all outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_weights_get(
    w: *const BiharpWeights,
    index: usize,
    i_level: *mut u32,
    i_index: *mut u64,
    j_level: *mut u32,
    j_index: *mut u64,
    omega: *mut f64,
) -> BiharpStatus {
    guard(|| {
        let w = &deref(w, "weights")?.0;
        let (r, om) = w
            .iter()
            .nth(index)
            .ok_or_else(|| Failure(BiharpStatus::OutOfRange, format!("index {index} of {}", w.len())))?;
        if i_level.is_null() || i_index.is_null() || j_level.is_null() || j_index.is_null() || omega.is_null() {
            return Err(null("output pointer"));
        }
        write(i_level, r.i.level())?;
        write(i_index, r.i.index())?;
        write(j_level, r.j.level())?;
        write(j_index, r.j.index())?;
        write(omega, om)
    })
}

/// `B^(1/p)`.
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_weights_domination_constant(w: *const BiharpWeights, out: *mut f64) -> BiharpStatus {
    guard(|| write(out, deref(w, "weights")?.0.domination_constant()))
}

/// JSON export; free the result with [`biharp_string_free`].
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_weights_to_json(w: *const BiharpWeights, out: *mut *mut c_char) -> BiharpStatus {
    guard(|| {
        let s = weights_to_json(&deref(w, "weights")?.0)?;
        write(out, CString::new(s).unwrap_or_default().into_raw())
    })
}

/// `‖M_f φ‖_{H^p} / (B^(1/p) (Σ φ^2 ω)^(1/2))` for `φ` given on the support
/// of `f` in rectangle order (`len` must equal the support size). Returns
/// `Violation` when the ratio exceeds 1 beyond round-off.
///
/// # Safety
/// Handles must be live; `phi` must hold `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharp_domination_ratio(
    h: *const BiharpExpansion,
    w: *const BiharpWeights,
    phi: *const f64,
    len: usize,
    out: *mut f64,
) -> BiharpStatus {
    guard(|| {
        let f = &deref(h, "expansion")?.0;
        let w = &deref(w, "weights")?.0;
        let values = slice(phi, len, "phi")?;
        if len != f.support_len() {
            return Err(Failure(
                BiharpStatus::OutOfRange,
                format!("phi has {len} entries, support has {}", f.support_len()),
            ));
        }
        let seq = MultiplierSequence::from_entries(f.support().copied().zip(values.iter().copied()));
        write(out, domination_check(f, w, &seq)?.ratio)
    })
}

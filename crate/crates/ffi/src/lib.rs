//! C ABI over `schatten-lab`.
//!
//! Objects are opaque heap handles created by `sl_*` constructors and released
//! with the matching `sl_*_free`. Every fallible call returns an [`SlStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`sl_last_error_message`].

use num_complex::Complex64;
use schatten_lab::operators::{assemble_tg_in, OperatorMatrix};
use schatten_lab::spaces::{SpaceParams, Symbol};
use schatten_lab::spectra::{monomial_spectrum_closed_form, schatten_norm, singular_values, SchattenOrder, Spectrum};
use schatten_lab::LabError;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Numerical = 3,
    Io = 4,
    Utf8 = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Inner-product convention for `sl_assemble_tg`.
pub const SL_MODE_COEFFICIENT: u32 = 0;
pub const SL_MODE_INTEGRAL: u32 = 1;

pub struct SlSymbol(Symbol);
pub struct SlMatrix(OperatorMatrix);
pub struct SlSpectrum(Spectrum);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn fail(status: SlStatus, msg: impl Into<String>) -> SlStatus {
    set_error(msg);
    status
}

fn from_lab(e: LabError) -> SlStatus {
    let status = match e {
        LabError::InvalidParameter { .. } => SlStatus::InvalidParameter,
        LabError::Numerical(_) => SlStatus::Numerical,
        LabError::Io(_) | LabError::Json(_) => SlStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `f` with panics turned into `SlStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), SlStatus>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(SlStatus::Panic, "internal panic"),
    }
}

fn lab<T>(r: schatten_lab::Result<T>) -> Result<T, SlStatus> {
    r.map_err(from_lab)
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), SlStatus> {
    if out.is_null() {
        return Err(fail(SlStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, SlStatus> {
    p.as_ref().ok_or_else(|| fail(SlStatus::NullPointer, format!("{what} handle is null")))
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, SlStatus> {
    if s.is_null() {
        return Err(fail(SlStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(SlStatus::Utf8, "string argument is not UTF-8"))
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// g(z) = z^j, j ≥ 1.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sl_symbol_monomial(j: usize, out: *mut *mut SlSymbol) -> SlStatus {
    guard(|| put(out, SlSymbol(lab(Symbol::monomial(j))?)))
}

/// g(z) = (1 − a z)^{−γ} with a = a_re + i a_im, |a| < 1.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sl_symbol_kernel_power(a_re: f64, a_im: f64, gamma: f64, out: *mut *mut SlSymbol) -> SlStatus {
    guard(|| put(out, SlSymbol(lab(Symbol::kernel_power(Complex64::new(a_re, a_im), gamma))?)))
}

/// Symbol from its compact text form, e.g. `"monomial:3"` or `"kernelpow:0.9,1"`.
///
/// # Safety
/// `spec` must be NUL-terminated; `out` as for `sl_symbol_monomial`.
#[no_mangle]
pub unsafe extern "C" fn sl_symbol_parse(spec: *const c_char, out: *mut *mut SlSymbol) -> SlStatus {
    guard(|| put(out, SlSymbol(lab(Symbol::parse(text(spec)?))?)))
}

/// Symbol from a JSON document.
///
/// # Safety
/// `json` must be NUL-terminated; `out` as for `sl_symbol_monomial`.
#[no_mangle]
pub unsafe extern "C" fn sl_symbol_from_json(json: *const c_char, out: *mut *mut SlSymbol) -> SlStatus {
    guard(|| put(out, SlSymbol(lab(Symbol::from_json(text(json)?))?)))
}

/// # Safety
/// `s` must be NULL or a handle from an `sl_symbol_*` constructor, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sl_symbol_free(s: *mut SlSymbol) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Matrix of T_g on D_α truncated to indices 0..=n.
/// `mode` is `SL_MODE_COEFFICIENT` or `SL_MODE_INTEGRAL`.
///
/// # Safety
/// `g` must be a live symbol handle; `out` as for `sl_symbol_monomial`.
#[no_mangle]
pub unsafe extern "C" fn sl_assemble_tg(
    g: *const SlSymbol,
    alpha: f64,
    n: usize,
    mode: u32,
    out: *mut *mut SlMatrix,
) -> SlStatus {
    guard(|| {
        let g = get(g, "symbol")?;
        let space = match mode {
            SL_MODE_COEFFICIENT => lab(SpaceParams::coefficient(alpha))?,
            SL_MODE_INTEGRAL => lab(SpaceParams::integral(alpha))?,
            m => return Err(fail(SlStatus::InvalidParameter, format!("unknown mode {m}"))),
        };
        put(out, SlMatrix(lab(assemble_tg_in(&g.0, space, n))?))
    })
}

/// Side length of the stored block (n + 1).
///
/// # Safety
/// `m` must be NULL or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn sl_matrix_dim(m: *const SlMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Bound on the squared Frobenius norm of the part outside the block.
///
/// # Safety
/// `m` must be a live matrix handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sl_matrix_tail_certificate(m: *const SlMatrix, out: *mut f64) -> SlStatus {
    guard(|| {
        let m = get(m, "matrix")?;
        if out.is_null() {
            return Err(fail(SlStatus::NullPointer, "output pointer is null"));
        }
        *out = m.0.tail_certificate;
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a handle from `sl_assemble_tg`, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sl_matrix_free(m: *mut SlMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Singular values of the assembled block, nonincreasing.
///
/// # Safety
/// `m` must be a live matrix handle; `out` as for `sl_symbol_monomial`.
#[no_mangle]
pub unsafe extern "C" fn sl_singular_values(m: *const SlMatrix, out: *mut *mut SlSpectrum) -> SlStatus {
    guard(|| {
        let m = get(m, "matrix")?;
        put(out, SlSpectrum(lab(singular_values(&m.0))?))
    })
}

/// Closed-form spectrum of T_{z^j} on D_α (coefficient norm), indices j..=n.
///
/// # Safety
/// `out` as for `sl_symbol_monomial`.
#[no_mangle]
pub unsafe extern "C" fn sl_monomial_closed_form(j: usize, alpha: f64, n: usize, out: *mut *mut SlSpectrum) -> SlStatus {
    guard(|| put(out, SlSpectrum(lab(monomial_spectrum_closed_form(j, alpha, n))?)))
}

/// # Safety
/// `s` must be NULL or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_len(s: *const SlSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.values.len())
}

/// Copies the singular values into `buf`. `*written` receives the spectrum length
/// even when `cap` is too small (then `SL_STATUS_BUFFER_TOO_SMALL` is returned).
///
/// # Safety
/// `buf` must have room for `cap` doubles (may be NULL when `cap` is 0); `written` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_values(
    s: *const SlSpectrum,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> SlStatus {
    guard(|| {
        let v = &get(s, "spectrum")?.0.values;
        if !written.is_null() {
            *written = v.len();
        }
        if cap < v.len() {
            return Err(fail(
                SlStatus::BufferTooSmall,
                format!("buffer holds {cap} values, spectrum has {}", v.len()),
            ));
        }
        if !v.is_empty() {
            if buf.is_null() {
                return Err(fail(SlStatus::NullPointer, "buffer is null"));
            }
            ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        }
        Ok(())
    })
}

/// Schatten p-norm of the spectrum: the truncated value, an upper bound from the
/// tail model, and the best estimate of the untruncated norm. Any output may be NULL.
///
/// # Safety
/// `s` must be a live spectrum handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_schatten_norm(
    s: *const SlSpectrum,
    p: f64,
    value: *mut f64,
    upper: *mut f64,
    estimate: *mut f64,
) -> SlStatus {
    guard(|| {
        let s = get(s, "spectrum")?;
        let n = schatten_norm(&s.0, lab(SchattenOrder::new(p))?);
        for (dst, v) in [(value, n.value), (upper, n.upper), (estimate, n.estimate)] {
            if !dst.is_null() {
                *dst = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a spectrum handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sl_spectrum_free(s: *mut SlSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

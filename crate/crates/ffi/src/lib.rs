//! C ABI over `harper-core`.
//!
//! Every entry point returns a [`HarperStatus`]; results go through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`harper_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use harper_core::absorbing::dense_lambda_star;
use harper_core::bulk::{elliptic_k, f2_density};
use harper_core::spectral::{build_harper, CirculantPlusDiagonal};
use harper_core::uncertainty::theorem1_bound;
use harper_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarperStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque handle to a circulant-plus-diagonal matrix.
pub struct HarperMatrix(CirculantPlusDiagonal);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> HarperStatus {
    if err.is_validation() {
        HarperStatus::InvalidArgument
    } else {
        HarperStatus::Numerical
    }
}

/// Runs `f`, clearing the last error on success and recording it otherwise.
fn guard(f: impl FnOnce() -> Result<(), (HarperStatus, String)>) -> HarperStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HarperStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HarperStatus::Panic
        }
    }
}

fn core<T>(r: harper_core::Result<T>) -> Result<T, (HarperStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (HarperStatus, String) {
    (HarperStatus::NullPointer, format!("{name} is null"))
}

/// Builds the Harper matrix of size `n` with frequency `a`.
///
/// # Safety
/// `out` must be valid for a pointer write. The handle must be released
/// with [`harper_matrix_free`].
#[no_mangle]
pub unsafe extern "C" fn harper_matrix_new(n: usize, a: usize, out: *mut *mut HarperMatrix) -> HarperStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = core(build_harper(n, a))?;
        *out = Box::into_raw(Box::new(HarperMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`harper_matrix_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn harper_matrix_free(m: *mut HarperMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn harper_matrix_size(m: *const HarperMatrix, out: *mut usize) -> HarperStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = m.0.n();
        Ok(())
    })
}

/// Writes all eigenvalues in descending order. `len` must be at least the
/// matrix size.
///
/// # Safety
/// `m` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn harper_matrix_eigenvalues(m: *const HarperMatrix, buf: *mut f64, len: usize) -> HarperStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let n = m.0.n();
        if len < n {
            return Err((HarperStatus::BufferTooSmall, format!("need {n} doubles, got {len}")));
        }
        let ev = core(m.0.eigenvalues())?;
        ptr::copy_nonoverlapping(ev.as_ptr(), buf, n);
        Ok(())
    })
}

/// Upper bound on the top eigenvalue from time and frequency windows of
/// sizes `k` and `k_prime`.
///
/// # Safety
/// `m` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn harper_matrix_top_bound(
    m: *const HarperMatrix,
    k: usize,
    k_prime: usize,
    out: *mut f64,
) -> HarperStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = core(theorem1_bound(&m.0.circulant, &m.0.diagonal, k, k_prime))?.bound;
        Ok(())
    })
}

/// Top eigenvalue of the killed walk generator of size `n`, frequency `a`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn harper_lambda_star(n: usize, a: usize, out: *mut f64) -> HarperStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = core(dense_lambda_star(n, a))?;
        Ok(())
    })
}

/// Complete elliptic integral of the first kind, modulus `k` in [0, 1).
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn harper_elliptic_k(k: f64, out: *mut f64) -> HarperStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = core(elliptic_k(k))?;
        Ok(())
    })
}

/// Limiting bulk density at `x`; infinite at the singular point 0, zero
/// outside [-1, 1].
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn harper_bulk_density(x: f64, out: *mut f64) -> HarperStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !x.is_finite() {
            return Err((HarperStatus::InvalidArgument, format!("x must be finite, got {x}")));
        }
        *out = f2_density(x).value().unwrap_or(f64::INFINITY);
        Ok(())
    })
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length
/// without the terminator; 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn harper_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

//! C interface to `vrlab`.
//!
//! # Handles
//!
//! Bodies cross the boundary as opaque `VrBody` pointers. Every pointer
//! returned through an out-parameter must be released with
//! [`vr_body_free`] exactly once.
//!
//! # Error handling
//!
//! Every fallible function returns a [`VrStatus`]: `VR_STATUS_OK` (0) on
//! success and a negative code otherwise. Out-parameters are written only on
//! success. The message for the most recent failure on the calling thread is
//! available from [`vr_last_error`].
//!
//! # Safety
//!
//! Pointers passed in must be null or valid for the stated number of
//! elements. Handles must come from this library and must not be used after
//! they are freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nalgebra::DVector;
use vrlab::io::{load_body, Body};
use vrlab::random::gluskin_polytope;
use vrlab::{exact_volume, loewner_normalize, minkowski_norm, support, vr_upper, Error, SymVPolytope};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VrStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidArgument = -2,
    DimensionMismatch = -3,
    Degenerate = -4,
    DimensionTooLarge = -5,
    Numerical = -6,
    Io = -7,
    Parse = -8,
    Panic = -9,
}

/// Opaque centrally symmetric polytope.
pub struct VrBody {
    inner: SymVPolytope,
}

/// Result of a volume ratio computation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VrRatio {
    pub value: f64,
    pub det: f64,
    pub feasibility_slack: f64,
    pub converged: bool,
    pub restarts: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> VrStatus {
    match e {
        Error::DimensionMismatch { .. } => VrStatus::DimensionMismatch,
        Error::Degenerate(_) | Error::NotSpanning => VrStatus::Degenerate,
        Error::DimensionTooLarge { .. } => VrStatus::DimensionTooLarge,
        Error::Lp(_) | Error::ZeroHits(_) => VrStatus::Numerical,
        Error::Io { .. } => VrStatus::Io,
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => VrStatus::Parse,
        _ => VrStatus::InvalidArgument,
    }
}

struct Fail(VrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(VrStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            VrStatus::Panic
        }
    }
}

unsafe fn body_ref<'a>(body: *const VrBody) -> Result<&'a SymVPolytope, Fail> {
    body.as_ref().map(|b| &b.inner).ok_or_else(|| null("body"))
}

unsafe fn emit(out: *mut *mut VrBody, body: SymVPolytope) {
    *out = Box::into_raw(Box::new(VrBody { inner: body }));
}

unsafe fn vector(body: &SymVPolytope, x: *const f64, len: usize) -> Result<DVector<f64>, Fail> {
    if x.is_null() {
        return Err(null("x"));
    }
    if len != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: len }.into());
    }
    Ok(DVector::from_column_slice(std::slice::from_raw_parts(x, len)))
}

/// Message for the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn vr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Absolute convex hull of `count` generators of length `dim`, stored row by
/// row in `data`.
///
/// # Safety
/// `data` must hold `dim * count` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_from_generators(
    data: *const f64,
    dim: usize,
    count: usize,
    out: *mut *mut VrBody,
) -> VrStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if dim == 0 || count == 0 {
            return Err(Fail(VrStatus::InvalidArgument, "dim and count must be positive".into()));
        }
        let values = std::slice::from_raw_parts(data, dim * count);
        let rows: Vec<Vec<f64>> = values.chunks(dim).map(<[f64]>::to_vec).collect();
        emit(out, SymVPolytope::from_rows(&rows)?);
        Ok(())
    })
}

/// `B_1^n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_cross_polytope(n: usize, out: *mut *mut VrBody) -> VrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(Fail(VrStatus::InvalidArgument, "n must be positive".into()));
        }
        emit(out, SymVPolytope::cross_polytope(n));
        Ok(())
    })
}

/// `B_∞^n`, for `n <= 20`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_cube(n: usize, out: *mut *mut VrBody) -> VrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        emit(out, SymVPolytope::cube(n)?);
        Ok(())
    })
}

/// Gaussian random polytope with `big_n` Gaussian generators plus the scaled
/// coordinate vectors. `omega0`, if non-null, receives whether every Gaussian
/// norm lies in the typical window.
///
/// # Safety
/// `out` must be writable; `omega0` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_gaussian(
    n: usize,
    big_n: usize,
    seed: u64,
    out: *mut *mut VrBody,
    omega0: *mut bool,
) -> VrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sample = gluskin_polytope(n, big_n, seed)?;
        if !omega0.is_null() {
            *omega0 = sample.omega0;
        }
        emit(out, sample.into_body());
        Ok(())
    })
}

/// Reads a single symmetric body from a body file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_load(path: *const c_char, out: *mut *mut VrBody) -> VrStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(VrStatus::InvalidArgument, "path is not UTF-8".into()))?;
        match load_body(Path::new(path))? {
            Body::Sym(b) => {
                emit(out, b);
                Ok(())
            }
            _ => Err(Fail(VrStatus::InvalidArgument, format!("{path}: not a symmetric body"))),
        }
    })
}

/// Releases a body. Null is ignored.
///
/// # Safety
/// `body` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn vr_body_free(body: *mut VrBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Ambient dimension, or 0 for null.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vr_body_dim(body: *const VrBody) -> usize {
    body.as_ref().map_or(0, |b| b.inner.dim())
}

/// Number of generators, or 0 for null.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vr_body_generator_count(body: *const VrBody) -> usize {
    body.as_ref().map_or(0, |b| b.inner.len())
}

/// Exact volume.
///
/// # Safety
/// `body` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_volume(body: *const VrBody, out: *mut f64) -> VrStatus {
    guard(|| {
        let b = body_ref(body)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = exact_volume(b)?.value;
        Ok(())
    })
}

/// Minkowski gauge `‖x‖_K`.
///
/// # Safety
/// `x` must hold `len` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_norm(body: *const VrBody, x: *const f64, len: usize, out: *mut f64) -> VrStatus {
    guard(|| {
        let b = body_ref(body)?;
        let v = vector(b, x, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = minkowski_norm(b, &v)?;
        Ok(())
    })
}

/// Support function `h_K(y)`.
///
/// # Safety
/// `y` must hold `len` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_support(body: *const VrBody, y: *const f64, len: usize, out: *mut f64) -> VrStatus {
    guard(|| {
        let b = body_ref(body)?;
        let v = vector(b, y, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = support(b, &v)?;
        Ok(())
    })
}

/// Linear image of the body whose Löwner ellipsoid is `√n B_2^n`.
///
/// # Safety
/// `body` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vr_body_loewner_normalize(body: *const VrBody, out: *mut *mut VrBody) -> VrStatus {
    guard(|| {
        let b = body_ref(body)?;
        if out.is_null() {
            return Err(null("out"));
        }
        emit(out, loewner_normalize(b)?);
        Ok(())
    })
}

/// Upper estimate of `vr(outer, inner)` from `restarts` seeded starts.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vr_ratio(
    outer: *const VrBody,
    inner: *const VrBody,
    restarts: usize,
    seed: u64,
    out: *mut VrRatio,
) -> VrStatus {
    guard(|| {
        let k = body_ref(outer)?;
        let l = body_ref(inner)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = vr_upper(k, l, restarts, seed)?;
        *out = VrRatio {
            value: r.value,
            det: r.det(),
            feasibility_slack: r.feasibility_slack,
            converged: r.converged,
            restarts: r.restarts,
        };
        Ok(())
    })
}

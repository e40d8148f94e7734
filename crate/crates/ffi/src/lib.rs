//! C ABI for `score-core`.
//!
//! Every fallible function returns a [`ScoreStatus`]; on failure the message
//! is kept per thread and can be read with [`score_last_error_message`].
//! Threshold selection returns an opaque [`ScoreSelection`] handle that must
//! be released with [`score_selection_free`].
//!
//! Slices are passed as `(pointer, length)`; lengths must be at least 1.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use score_core::{
    build_grid, dof_ht_closed_form, edof_ht, hard_threshold, risk_criterion, score,
    select_threshold, soft_threshold, BandwidthSchedule, Error, NoiseModel, SelectionResult,
    SignalVector, Spacing, Threshold,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidParameter = 3,
    InvalidConfiguration = 4,
    Io = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreSpacing {
    Linear = 0,
    Log = 1,
}

/// Exact DOF of hard thresholding, split into its two terms.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScoreDofDecomposition {
    pub count_term: f64,
    pub jump_term: f64,
    pub total: f64,
}

/// One row of a selection's risk curve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScoreCurveRow {
    pub lambda: f64,
    pub score: f64,
    pub edof: f64,
}

/// Opaque result of [`score_select_threshold`].
pub struct ScoreSelection {
    inner: SelectionResult,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> ScoreStatus {
    match err {
        Error::InvalidInput(_) | Error::Parse { .. } => ScoreStatus::InvalidInput,
        Error::InvalidParameter { .. } => ScoreStatus::InvalidParameter,
        Error::InvalidConfiguration(_) => ScoreStatus::InvalidConfiguration,
        Error::Io { .. } => ScoreStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Range(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ScoreStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScoreStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed for `{name}`"));
            ScoreStatus::NullPointer
        }
        Ok(Err(Failure::Range(msg))) => {
            set_error(msg);
            ScoreStatus::OutOfRange
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            ScoreStatus::Panic
        }
    }
}

unsafe fn signal(ptr: *const f64, len: usize, name: &'static str) -> Result<SignalVector, Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: caller guarantees `ptr` points to `len` readable doubles.
    let values = unsafe { std::slice::from_raw_parts(ptr, len) };
    Ok(SignalVector::new(values.to_vec())?)
}

unsafe fn write<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: caller guarantees `out` is valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn write_slice(out: *mut f64, values: &[f64], name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: caller guarantees `out` has room for `values.len()` doubles.
    unsafe { std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len()) };
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `buf_len - 1` bytes). Returns the full message length in
/// bytes, excluding the terminator; `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn score_last_error_message(buf: *mut c_char, buf_len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && buf_len > 0 {
            let n = bytes.len().min(buf_len - 1);
            // SAFETY: `buf` has room for `buf_len` bytes and n < buf_len.
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Hard thresholding of `y` into `out` (both of length `len`).
///
/// # Safety
/// `y` must be readable and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn score_hard_threshold(
    y: *const f64,
    len: usize,
    lambda: f64,
    out: *mut f64,
) -> ScoreStatus {
    guard(|| {
        let y = unsafe { signal(y, len, "y")? };
        let x = hard_threshold(&y, Threshold::new(lambda)?);
        unsafe { write_slice(out, x.as_slice(), "out") }
    })
}

/// Soft thresholding of `y` into `out` (both of length `len`).
///
/// # Safety
/// `y` must be readable and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn score_soft_threshold(
    y: *const f64,
    len: usize,
    lambda: f64,
    out: *mut f64,
) -> ScoreStatus {
    guard(|| {
        let y = unsafe { signal(y, len, "y")? };
        let x = soft_threshold(&y, Threshold::new(lambda)?);
        unsafe { write_slice(out, x.as_slice(), "out") }
    })
}

/// Smoothed DOF estimate of hard thresholding.
///
/// # Safety
/// `y` must be readable for `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn score_edof_ht(
    y: *const f64,
    len: usize,
    lambda: f64,
    sigma: f64,
    h: f64,
    out: *mut f64,
) -> ScoreStatus {
    guard(|| {
        let y = unsafe { signal(y, len, "y")? };
        let v = edof_ht(&y, Threshold::new(lambda)?, NoiseModel::new(sigma)?, h)?;
        unsafe { write(out, v, "out") }
    })
}

/// SCORE of hard thresholding at `lambda`.
///
/// # Safety
/// `y` must be readable for `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn score_score(
    y: *const f64,
    len: usize,
    lambda: f64,
    sigma: f64,
    h: f64,
    out: *mut f64,
) -> ScoreStatus {
    guard(|| {
        let y = unsafe { signal(y, len, "y")? };
        let v = score(&y, Threshold::new(lambda)?, NoiseModel::new(sigma)?, h)?;
        unsafe { write(out, v, "out") }
    })
}

/// `‖y − x‖² − Pσ² + 2σ²·dof`.
///
/// # Safety
/// `y` and `x` must be readable for `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn score_risk_criterion(
    y: *const f64,
    x: *const f64,
    len: usize,
    dof: f64,
    sigma: f64,
    out: *mut f64,
) -> ScoreStatus {
    guard(|| {
        let y = unsafe { signal(y, len, "y")? };
        let x = unsafe { signal(x, len, "x")? };
        let v = risk_criterion(&y, &x, dof, NoiseModel::new(sigma)?)?;
        unsafe { write(out, v, "out") }
    })
}

/// Exact DOF of hard thresholding for a known clean signal `x0`.
///
/// # Safety
/// `x0` must be readable for `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn score_dof_ht_closed_form(
    x0: *const f64,
    len: usize,
    lambda: f64,
    sigma: f64,
    out: *mut ScoreDofDecomposition,
) -> ScoreStatus {
    guard(|| {
        let x0 = unsafe { signal(x0, len, "x0")? };
        let d = dof_ht_closed_form(&x0, Threshold::new(lambda)?, NoiseModel::new(sigma)?)?;
        let value = ScoreDofDecomposition {
            count_term: d.count_term,
            jump_term: d.jump_term,
            total: d.total,
        };
        unsafe { write(out, value, "out") }
    })
}

/// Bandwidth `c·σ / P^alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn score_bandwidth(
    p: usize,
    sigma: f64,
    c: f64,
    alpha: f64,
    out: *mut f64,
) -> ScoreStatus {
    guard(|| {
        let schedule = BandwidthSchedule::new(c, alpha)?;
        let h = schedule.bandwidth(p, NoiseModel::new(sigma)?);
        unsafe { write(out, h, "out") }
    })
}

/// Grid search for the SCORE-minimizing threshold over `n_points` values
/// in `[lambda_min, lambda_max]`, with bandwidth `c·σ / P^alpha`. On
/// success `*out` receives a handle owned by the caller.
///
/// # Safety
/// `y` must be readable for `len` doubles; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn score_select_threshold(
    y: *const f64,
    len: usize,
    sigma: f64,
    lambda_min: f64,
    lambda_max: f64,
    n_points: usize,
    spacing: ScoreSpacing,
    c: f64,
    alpha: f64,
    out: *mut *mut ScoreSelection,
) -> ScoreStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let y = unsafe { signal(y, len, "y")? };
        let spacing = match spacing {
            ScoreSpacing::Linear => Spacing::Linear,
            ScoreSpacing::Log => Spacing::Log,
        };
        let grid = build_grid(lambda_min, lambda_max, n_points, spacing)?;
        let schedule = BandwidthSchedule::new(c, alpha)?;
        let inner = select_threshold(&y, &grid, NoiseModel::new(sigma)?, &schedule)?;
        let handle = Box::into_raw(Box::new(ScoreSelection { inner }));
        unsafe { write(out, handle, "out") }
    })
}

/// Releases a selection handle. Null is a no-op.
///
/// # Safety
/// `handle` must be null or come from [`score_select_threshold`] and not
/// have been freed.
#[no_mangle]
pub unsafe extern "C" fn score_selection_free(handle: *mut ScoreSelection) {
    if !handle.is_null() {
        // SAFETY: allocated by Box::into_raw in score_select_threshold.
        drop(unsafe { Box::from_raw(handle) });
    }
}

unsafe fn selection<'a>(handle: *const ScoreSelection) -> Result<&'a SelectionResult, Failure> {
    // SAFETY: caller guarantees a live handle or null.
    unsafe { handle.as_ref() }
        .map(|s| &s.inner)
        .ok_or(Failure::Null("handle"))
}

/// Selected threshold; NaN for a null handle.
///
/// # Safety
/// `handle` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn score_selection_lambda_star(handle: *const ScoreSelection) -> f64 {
    unsafe { selection(handle) }.map_or(f64::NAN, |s| s.lambda_star)
}

/// Minimum SCORE over the grid; NaN for a null handle.
///
/// # Safety
/// `handle` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn score_selection_score_star(handle: *const ScoreSelection) -> f64 {
    unsafe { selection(handle) }.map_or(f64::NAN, |s| s.score_star)
}

/// Length of the denoised vector; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn score_selection_len(handle: *const ScoreSelection) -> usize {
    unsafe { selection(handle) }.map_or(0, |s| s.x_star.len())
}

/// Number of curve rows; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn score_selection_curve_len(handle: *const ScoreSelection) -> usize {
    unsafe { selection(handle) }.map_or(0, |s| s.curve.rows.len())
}

/// Copies the denoised vector into `out`, which must hold `len` doubles;
/// `len` must equal [`score_selection_len`].
///
/// # Safety
/// `handle` must be live; `out` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn score_selection_copy_x_star(
    handle: *const ScoreSelection,
    out: *mut f64,
    len: usize,
) -> ScoreStatus {
    guard(|| {
        let s = unsafe { selection(handle)? };
        if len != s.x_star.len() {
            return Err(Failure::Range(format!(
                "buffer length {len} does not match signal length {}",
                s.x_star.len()
            )));
        }
        unsafe { write_slice(out, s.x_star.as_slice(), "out") }
    })
}

/// Reads curve row `index`.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn score_selection_curve_row(
    handle: *const ScoreSelection,
    index: usize,
    out: *mut ScoreCurveRow,
) -> ScoreStatus {
    guard(|| {
        let s = unsafe { selection(handle)? };
        let row = s.curve.rows.get(index).ok_or_else(|| {
            Failure::Range(format!(
                "row {index} out of range ({} rows)",
                s.curve.rows.len()
            ))
        })?;
        let value = ScoreCurveRow {
            lambda: row.lambda,
            score: row.score,
            edof: row.edof,
        };
        unsafe { write(out, value, "out") }
    })
}

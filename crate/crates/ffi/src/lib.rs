//! C ABI for the `gcg` solver.
//!
//! Problems and results are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`GcgStatus`]; on failure a message
//! is kept per thread and can be read with [`gcg_last_error_message`].
//! No call unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gcg::registry::Problem;
use gcg::solver::{self, ArmijoParams, SolveResult, SolveStatus, SolverConfig};
use gcg::GcgError;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcgStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Bad parameter, buffer size or string.
    InvalidArgument = 2,
    UnknownProblem = 3,
    /// Linear solve, line search or gap check failed.
    Numerical = 4,
    /// Index past the end of the history.
    OutOfRange = 5,
    /// Internal panic caught at the boundary.
    Internal = 6,
}

/// How a solve terminated.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcgTermination {
    Converged = 0,
    MaxIterReached = 1,
    LineSearchFailed = 2,
}

/// Solver settings; start from [`gcg_solver_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcgSolverOptions {
    pub gap_tol: f64,
    pub max_iter: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub max_backtracks: u32,
}

/// One row of the convergence history.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GcgRecord {
    pub k: usize,
    pub j_value: f64,
    pub gap: f64,
    pub step: f64,
    pub backtracks: u32,
}

/// A registered example problem.
pub struct GcgProblem {
    inner: Problem,
}

/// The outcome of a solve.
pub struct GcgResult {
    inner: SolveResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &GcgError) -> GcgStatus {
    match err {
        GcgError::InvalidInput(_) | GcgError::Parse(_) | GcgError::DimensionMismatch { .. } | GcgError::Io { .. } => {
            GcgStatus::InvalidArgument
        }
        GcgError::UnknownProblem(_) => GcgStatus::UnknownProblem,
        GcgError::NegativeGap { .. } | GcgError::LineSearchFailed { .. } | GcgError::Numerical(_) => GcgStatus::Numerical,
    }
}

/// Runs `body`, recording the error message and mapping panics.
fn guard(body: impl FnOnce() -> Result<(), (GcgStatus, String)>) -> GcgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GcgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            GcgStatus::Internal
        }
    }
}

fn lib_err(e: GcgError) -> (GcgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GcgStatus, String) {
    (GcgStatus::NullPointer, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn gcg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gcg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `α = 0.5`, `γ = 0.99`, gap tolerance `1e-10`, 1000 iterations.
#[no_mangle]
pub extern "C" fn gcg_solver_options_default() -> GcgSolverOptions {
    let d = SolverConfig::default();
    GcgSolverOptions {
        gap_tol: d.gap_tol,
        max_iter: d.max_iter,
        alpha: d.armijo.alpha(),
        gamma: d.armijo.gamma(),
        max_backtracks: d.armijo.max_backtracks(),
    }
}

/// Builds the registered problem `name` with `n` spatial nodes per direction
/// and `nt` time steps (ignored for elliptic problems).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcg_problem_new(name: *const c_char, n: usize, nt: usize, out: *mut *mut GcgProblem) -> GcgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (GcgStatus::InvalidArgument, "problem name is not UTF-8".to_string()))?;
        let inner = Problem::build(name, n, nt).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GcgProblem { inner }));
        Ok(())
    })
}

/// Releases a problem. Null is ignored.
///
/// # Safety
/// `problem` must come from [`gcg_problem_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gcg_problem_free(problem: *mut GcgProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of control values (grid nodes, times the time steps for
/// parabolic problems). Zero for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_problem_len(problem: *const GcgProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.zero_control().len())
}

/// Solves from `u0` (or from zero when `u0` is null). `u0_len` must equal
/// [`gcg_problem_len`] when `u0` is given; `options` may be null for defaults.
///
/// # Safety
/// Pointers must be valid; `u0` must hold `u0_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gcg_solve(
    problem: *const GcgProblem,
    options: *const GcgSolverOptions,
    u0: *const f64,
    u0_len: usize,
    out: *mut *mut GcgResult,
) -> GcgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let problem = &problem.as_ref().ok_or_else(|| null("problem"))?.inner;
        let opts = options.as_ref().copied().unwrap_or_else(|| gcg_solver_options_default());
        let armijo = ArmijoParams::new(opts.alpha, opts.gamma, opts.max_backtracks).map_err(lib_err)?;
        let cfg = SolverConfig::new(opts.gap_tol, opts.max_iter, armijo).map_err(lib_err)?;
        let zero = problem.zero_control();
        let start = if u0.is_null() {
            zero
        } else {
            if u0_len != zero.len() {
                return Err(lib_err(GcgError::DimensionMismatch { expected: zero.len(), got: u0_len }));
            }
            zero.with_values(std::slice::from_raw_parts(u0, u0_len).to_vec()).map_err(lib_err)?
        };
        let inner = solver::gcg_solve(problem, start, &cfg).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GcgResult { inner }));
        Ok(())
    })
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must come from [`gcg_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gcg_result_free(result: *mut GcgResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcg_result_termination(result: *const GcgResult, out: *mut GcgTermination) -> GcgStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = match r.status {
            SolveStatus::Converged => GcgTermination::Converged,
            SolveStatus::MaxIterReached => GcgTermination::MaxIterReached,
            SolveStatus::LineSearchFailed => GcgTermination::LineSearchFailed,
        };
        Ok(())
    })
}

/// Number of steps taken; the history has one more record. Zero for null.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_result_iterations(result: *const GcgResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.iterations())
}

/// History record `k`, `0 ≤ k ≤ iterations`.
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcg_result_record(result: *const GcgResult, k: usize, out: *mut GcgRecord) -> GcgStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rec = r
            .history
            .get(k)
            .ok_or_else(|| (GcgStatus::OutOfRange, format!("record {k} of {}", r.history.len())))?;
        *out = GcgRecord { k: rec.k, j_value: rec.j_value, gap: rec.gap, step: rec.step, backtracks: rec.backtracks };
        Ok(())
    })
}

/// Copies the final control into `buf`, which must hold exactly
/// [`gcg_problem_len`] values.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gcg_result_control(result: *const GcgResult, buf: *mut f64, len: usize) -> GcgStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let vals = r.final_iterate.values();
        if len != vals.len() {
            return Err(lib_err(GcgError::DimensionMismatch { expected: vals.len(), got: len }));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(vals);
        Ok(())
    })
}

/// Objective value `f + g` of the final control.
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcg_result_objective(result: *const GcgResult, out: *mut f64) -> GcgStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        *out.as_mut().ok_or_else(|| null("out"))? = r.final_record().j_value;
        Ok(())
    })
}

//! C ABI over the tardybatch solver.
//!
//! Objects are opaque handles created by `tb_*` constructors and released with
//! the matching `*_free`. Every fallible call returns a `TbStatus`; on failure
//! `tb_last_error_message` describes the error on the calling thread. Strings
//! returned through `char **` out-parameters are owned by the caller and must
//! be released with `tb_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::time::Duration;

use tardybatch::construction::RclConfig;
use tardybatch::error::Error;
use tardybatch::generator::{generate, GenConfig};
use tardybatch::grasp::{solve, GraspConfig};
use tardybatch::io::{load_instance, parse_instance, InstanceFile, SolutionFile};
use tardybatch::oracle::exhaustive_optimum;
use tardybatch::{Batch, BatchSchedule, Instance};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    IoError = 5,
    TooLarge = 6,
    InvalidArgument = 7,
    Panic = 8,
}

/// A validated problem instance.
pub struct TbInstance {
    inner: Instance,
}

/// An evaluated schedule.
pub struct TbSolution {
    schedule: BatchSchedule,
}

/// Solver settings. Obtain defaults from `tb_solve_options_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TbSolveOptions {
    pub max_iters: u32,
    pub pr_iters: u32,
    /// Absolute candidate-list size; 0 selects `rcl_fraction`.
    pub rcl_size: u32,
    /// Candidate-list size as a fraction of the job count, in (0, 1].
    pub rcl_fraction: f64,
    pub alpha: f64,
    pub seed: u64,
    pub threads: u32,
    /// Wall-clock cap in seconds; 0 disables it.
    pub time_limit_secs: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> TbStatus {
    match e {
        Error::Parse { .. } => TbStatus::ParseError,
        Error::Invalid(_) | Error::Schedule(_) | Error::NotSamePermutationSet => TbStatus::ValidationError,
        Error::Io { .. } => TbStatus::IoError,
        Error::TooLarge { .. } => TbStatus::TooLarge,
        Error::Config(_) | Error::PoolTooSmall(_) => TbStatus::InvalidArgument,
    }
}

fn fail(status: TbStatus, message: impl Into<String>) -> TbStatus {
    set_error(message);
    status
}

fn from_error(e: Error) -> TbStatus {
    let status = status_of(&e);
    let message = match &e {
        Error::Invalid(inv) => inv.violations().iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        other => other.to_string(),
    };
    fail(status, message)
}

/// Runs `body`, converting panics into `TbStatus::Panic`.
fn guard(body: impl FnOnce() -> TbStatus) -> TbStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(TbStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, TbStatus> {
    if s.is_null() {
        return Err(fail(TbStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(TbStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn emit_string(out: *mut *mut c_char, text: String) -> TbStatus {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            TbStatus::Ok
        }
        Err(_) => fail(TbStatus::Panic, "string contains a nul byte"),
    }
}

macro_rules! require {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(TbStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next `tb_*` call on the same thread.
#[no_mangle]
pub extern "C" fn tb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates an instance from JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_from_json(json: *const c_char, out: *mut *mut TbInstance) -> TbStatus {
    guard(|| {
        require!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_instance(text) {
            Ok(inner) => {
                emit(out, TbInstance { inner });
                TbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Loads and validates an instance file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_load(path: *const c_char, out: *mut *mut TbInstance) -> TbStatus {
    guard(|| {
        require!(out);
        let path = match read_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_instance(Path::new(path)) {
            Ok(inner) => {
                emit(out, TbInstance { inner });
                TbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Generates a random instance with default ranges and capacity 40.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_generate(n: u32, gamma: f64, seed: u64, out: *mut *mut TbInstance) -> TbStatus {
    guard(|| {
        require!(out);
        if n == 0 {
            return fail(TbStatus::InvalidArgument, "n must be at least 1");
        }
        match generate(&GenConfig::new(n as usize, gamma, seed)) {
            Ok(inner) => {
                emit(out, TbInstance { inner });
                TbStatus::Ok
            }
            Err(Error::Config(m)) => fail(TbStatus::InvalidArgument, m),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `instance` must be NULL or a handle from a `tb_instance_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_free(instance: *mut TbInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of jobs, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_job_count(instance: *const TbInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.len())
}

/// Serializes the instance in the instance file format.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_instance_to_json(instance: *const TbInstance, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        require!(instance, out);
        let text = serde_json::to_string(&InstanceFile::new(&(*instance).inner, None)).expect("serializable");
        emit_string(out, text)
    })
}

#[no_mangle]
pub extern "C" fn tb_solve_options_default() -> TbSolveOptions {
    let d = GraspConfig::default();
    TbSolveOptions {
        max_iters: d.max_iters as u32,
        pr_iters: d.pr_iters as u32,
        rcl_size: 0,
        rcl_fraction: 0.10,
        alpha: d.alpha,
        seed: d.seed,
        threads: d.threads as u32,
        time_limit_secs: 0.0,
    }
}

fn config_from(o: &TbSolveOptions) -> Result<GraspConfig, String> {
    let rcl = if o.rcl_size > 0 { RclConfig::Absolute(o.rcl_size as usize) } else { RclConfig::Fraction(o.rcl_fraction) };
    let time_limit = if o.time_limit_secs > 0.0 && o.time_limit_secs.is_finite() {
        Some(Duration::from_secs_f64(o.time_limit_secs))
    } else if o.time_limit_secs == 0.0 {
        None
    } else {
        return Err("time_limit_secs must be finite and non-negative".into());
    };
    let cfg = GraspConfig {
        max_iters: o.max_iters as usize,
        pr_iters: o.pr_iters as usize,
        rcl,
        alpha: o.alpha,
        seed: o.seed,
        threads: o.threads as usize,
        time_limit,
        ..GraspConfig::default()
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Runs GRASP with path relinking. `options` may be NULL for defaults.
///
/// # Safety
/// `instance` must be a live handle, `options` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_solve(
    instance: *const TbInstance,
    options: *const TbSolveOptions,
    out: *mut *mut TbSolution,
) -> TbStatus {
    guard(|| {
        require!(instance, out);
        let opts = options.as_ref().copied().unwrap_or_else(|| tb_solve_options_default());
        let cfg = match config_from(&opts) {
            Ok(c) => c,
            Err(m) => return fail(TbStatus::InvalidArgument, m),
        };
        match solve(&(*instance).inner, &cfg) {
            Ok(report) => {
                emit(out, TbSolution { schedule: report.best });
                TbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Evaluates a batch list given as JSON, e.g. `[[5,4,1],[3,2]]`.
///
/// # Safety
/// `instance` must be a live handle, `batches_json` a nul-terminated string,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_evaluate(
    instance: *const TbInstance,
    batches_json: *const c_char,
    out: *mut *mut TbSolution,
) -> TbStatus {
    guard(|| {
        require!(instance, out);
        let text = match read_str(batches_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let batches: Vec<Batch> = match serde_json::from_str(text) {
            Ok(b) => b,
            Err(e) => return fail(TbStatus::ParseError, format!("malformed batches: {e}")),
        };
        match BatchSchedule::evaluate(&(*instance).inner, batches) {
            Ok(schedule) => {
                emit(out, TbSolution { schedule });
                TbStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Exact optimum by exhaustive search; fails with `TOO_LARGE` above `limit`
/// jobs.
///
/// # Safety
/// `instance` must be a live handle; `out_tardy` writable. `out_solution` may
/// be NULL; otherwise it receives an optimal schedule.
#[no_mangle]
pub unsafe extern "C" fn tb_oracle_optimum(
    instance: *const TbInstance,
    limit: u32,
    out_tardy: *mut usize,
    out_solution: *mut *mut TbSolution,
) -> TbStatus {
    guard(|| {
        require!(instance, out_tardy);
        match exhaustive_optimum(&(*instance).inner, limit as usize) {
            Ok(r) => {
                *out_tardy = r.optimum_tardy;
                if !out_solution.is_null() {
                    emit(out_solution, TbSolution { schedule: r.witness });
                }
                TbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_solution_free(solution: *mut TbSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_solution_tardy_count(solution: *const TbSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.schedule.tardy_count())
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_solution_makespan(solution: *const TbSolution) -> u64 {
    solution.as_ref().map_or(0, |s| s.schedule.makespan())
}

/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_solution_batch_count(solution: *const TbSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.schedule.batches().len())
}

/// Serializes the solution in the solution file format.
///
/// # Safety
/// `solution` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tb_solution_to_json(solution: *const TbSolution, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        require!(solution, out);
        let text = serde_json::to_string(&SolutionFile::from_schedule(&(*solution).schedule)).expect("serializable");
        emit_string(out, text)
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

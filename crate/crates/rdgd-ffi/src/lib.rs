//! C ABI over the rdgd simulator.
//!
//! Conventions: every function returns an [`RdgdStatus`]; results come back
//! through out-pointers; handles are opaque and freed with their matching
//! `_free` function; the last error message is kept per thread and fetched
//! with [`rdgd_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rdgd::config::{parse_config, ExperimentConfig};
use rdgd::experiment::{run_experiment, RunResult};

/// Status code of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdgdStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The configuration failed to parse or validate.
    ConfigError = 3,
    /// The experiment aborted at runtime.
    RuntimeError = 4,
    /// An index argument was out of range.
    OutOfRange = 5,
    /// The requested quantity was not recorded for this run.
    NotRecorded = 6,
    /// A panic crossed the boundary; state may be inconsistent.
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let msg = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard<F: FnOnce() -> RdgdStatus>(f: F) -> RdgdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic inside rdgd");
            RdgdStatus::Panic
        }
    }
}

/// Opaque parsed experiment configuration.
pub struct RdgdConfig(ExperimentConfig);

/// Opaque finished experiment.
pub struct RdgdRunResult(RunResult);

/// Copy the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes). Returns the full message length in bytes,
/// excluding the terminator.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (then only the
/// length is returned).
#[no_mangle]
pub unsafe extern "C" fn rdgd_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parse a configuration from NUL-terminated text into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdgd_config_parse(text: *const c_char, out: *mut *mut RdgdConfig) -> RdgdStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            set_error("null pointer");
            return RdgdStatus::NullPointer;
        }
        let text = match CStr::from_ptr(text).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config text is not valid UTF-8");
                return RdgdStatus::InvalidUtf8;
            }
        };
        match parse_config(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(RdgdConfig(cfg)));
                RdgdStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RdgdStatus::ConfigError
            }
        }
    })
}

/// # Safety
/// `config` must come from [`rdgd_config_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rdgd_config_free(config: *mut RdgdConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Override the root seed.
///
/// # Safety
/// `config` must be a live handle from [`rdgd_config_parse`].
#[no_mangle]
pub unsafe extern "C" fn rdgd_config_set_seed(config: *mut RdgdConfig, seed: u64) -> RdgdStatus {
    if config.is_null() {
        set_error("null pointer");
        return RdgdStatus::NullPointer;
    }
    (*config).0.seed = seed;
    RdgdStatus::Ok
}

/// Override the trial count (must be at least 1).
///
/// # Safety
/// `config` must be a live handle from [`rdgd_config_parse`].
#[no_mangle]
pub unsafe extern "C" fn rdgd_config_set_trials(config: *mut RdgdConfig, trials: usize) -> RdgdStatus {
    if config.is_null() {
        set_error("null pointer");
        return RdgdStatus::NullPointer;
    }
    if trials == 0 {
        set_error("trials must be at least 1");
        return RdgdStatus::ConfigError;
    }
    (*config).0.trials = trials;
    RdgdStatus::Ok
}

/// Run the experiment described by `config` and hand back a result handle.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdgd_run(config: *const RdgdConfig, out: *mut *mut RdgdRunResult) -> RdgdStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            set_error("null pointer");
            return RdgdStatus::NullPointer;
        }
        match run_experiment((*config).0.clone()) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(RdgdRunResult(result)));
                RdgdStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RdgdStatus::RuntimeError
            }
        }
    })
}

/// # Safety
/// `result` must come from [`rdgd_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rdgd_result_free(result: *mut RdgdRunResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of rounds in the run.
///
/// # Safety
/// `result` must be a live handle from [`rdgd_run`].
#[no_mangle]
pub unsafe extern "C" fn rdgd_result_rounds(result: *const RdgdRunResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).0.aggregate.len()
}

/// Number of trials in the run.
///
/// # Safety
/// `result` must be a live handle from [`rdgd_run`].
#[no_mangle]
pub unsafe extern "C" fn rdgd_result_trials(result: *const RdgdRunResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).0.trials.len()
}

unsafe fn aggregate_field(
    result: *const RdgdRunResult,
    t_index: usize,
    out: *mut f64,
    pick: impl Fn(&rdgd::experiment::AggregateRow) -> Option<f64>,
) -> RdgdStatus {
    if result.is_null() || out.is_null() {
        set_error("null pointer");
        return RdgdStatus::NullPointer;
    }
    let rows = &(*result).0.aggregate;
    let Some(row) = rows.get(t_index) else {
        set_error(format!("round index {t_index} out of range ({} rounds)", rows.len()));
        return RdgdStatus::OutOfRange;
    };
    match pick(row) {
        Some(v) => {
            *out = v;
            RdgdStatus::Ok
        }
        None => {
            set_error("quantity not recorded for this run");
            RdgdStatus::NotRecorded
        }
    }
}

/// Mean suboptimality gap at round index `t_index` (0-based).
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdgd_result_gap_mean(
    result: *const RdgdRunResult,
    t_index: usize,
    out: *mut f64,
) -> RdgdStatus {
    aggregate_field(result, t_index, out, |r| r.gap_mean)
}

/// Mean test accuracy at round index `t_index` (0-based).
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdgd_result_accuracy_mean(
    result: *const RdgdRunResult,
    t_index: usize,
    out: *mut f64,
) -> RdgdStatus {
    aggregate_field(result, t_index, out, |r| r.accuracy_mean)
}

/// Write trials.csv, aggregate.csv, and result.json into `dir`.
///
/// # Safety
/// `result` must be a live handle; `dir` a valid NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn rdgd_result_write(result: *const RdgdRunResult, dir: *const c_char) -> RdgdStatus {
    guard(|| {
        if result.is_null() || dir.is_null() {
            set_error("null pointer");
            return RdgdStatus::NullPointer;
        }
        let dir = match CStr::from_ptr(dir).to_str() {
            Ok(d) => Path::new(d),
            Err(_) => {
                set_error("path is not valid UTF-8");
                return RdgdStatus::InvalidUtf8;
            }
        };
        let run = &(*result).0;
        let io = || -> rdgd::Result<()> {
            std::fs::create_dir_all(dir)
                .map_err(|e| rdgd::Error::io(format!("creating {}", dir.display()), e))?;
            rdgd::io::csv::emit_trials_csv(run, &dir.join("trials.csv"))?;
            rdgd::io::csv::emit_aggregate_csv(run, &dir.join("aggregate.csv"))?;
            rdgd::io::json::emit_json(run, &dir.join("result.json"))?;
            Ok(())
        };
        match io() {
            Ok(()) => RdgdStatus::Ok,
            Err(err) => {
                set_error(err.to_string());
                RdgdStatus::RuntimeError
            }
        }
    })
}

/// Serialize the run metadata and traces to a JSON string. Free with
/// [`rdgd_string_free`].
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdgd_result_json(result: *const RdgdRunResult, out: *mut *mut c_char) -> RdgdStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            set_error("null pointer");
            return RdgdStatus::NullPointer;
        }
        match rdgd::io::json::result_to_json_string(&(*result).0) {
            Ok(text) => {
                *out = CString::new(text).unwrap_or_default().into_raw();
                RdgdStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RdgdStatus::RuntimeError
            }
        }
    })
}

/// # Safety
/// `s` must be a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdgd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Analytic transition time t0 for the restart algorithm.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdgd_transition_time(
    m_smooth: f64,
    alpha: f64,
    r_theta: f64,
    r: f64,
    out: *mut u64,
) -> RdgdStatus {
    guard(|| {
        if out.is_null() {
            set_error("null pointer");
            return RdgdStatus::NullPointer;
        }
        match rdgd::engine::transition_time(m_smooth, alpha, r_theta, r) {
            Ok(tt) => {
                *out = tt.t0 as u64;
                RdgdStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RdgdStatus::ConfigError
            }
        }
    })
}

/// W_-1 branch of the Lambert W function on [-1/e, 0).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdgd_lambert_w_minus1(x: f64, out: *mut f64) -> RdgdStatus {
    guard(|| {
        if out.is_null() {
            set_error("null pointer");
            return RdgdStatus::NullPointer;
        }
        match rdgd::numerics::lambert_w_minus1(x) {
            Ok(w) => {
                *out = w;
                RdgdStatus::Ok
            }
            Err(err) => {
                set_error(err.to_string());
                RdgdStatus::ConfigError
            }
        }
    })
}

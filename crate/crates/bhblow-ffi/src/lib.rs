//! C ABI for the Burgers–Hilbert blowup laboratory.
//!
//! Configurations and run results are exposed as opaque handles; every
//! fallible call returns a [`BhStatus`] code and stores a human-readable
//! message retrievable with [`bh_last_error`].  All pointers returned by
//! `bh_*_new`-style constructors must be released with the matching
//! `bh_*_free`.  Handles are not thread-safe; use one per thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bhblow::config::RunConfig;
use bhblow::experiment::{self, RunResult};
use bhblow::BhError;

/// Status codes mirroring the library's error taxonomy (and the CLI's exit
/// codes for the overlapping cases).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BhStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Invalid configuration or parameters.
    Config = 2,
    /// The run stopped before reaching its target.
    Partial = 3,
    /// A numeric failure (non-finite values, accuracy loss, resolution).
    Numeric = 4,
    /// I/O or serialization failure.
    Io = 5,
    /// A panic crossed the boundary; the handle state is unspecified.
    Panic = 6,
}

/// Opaque run configuration handle.
pub struct BhConfig(RunConfig);

/// Opaque completed-run handle.
pub struct BhRun(RunResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &BhError) -> BhStatus {
    match err.exit_code() {
        2 => BhStatus::Config,
        3 => BhStatus::Partial,
        4 => BhStatus::Numeric,
        _ => BhStatus::Io,
    }
}

fn fail(err: &BhError) -> BhStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guard<F: FnOnce() -> BhStatus>(f: F) -> BhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            BhStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

/// Pointer to the thread-local message of the last failed call. Valid until
/// the next failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn bh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build a named builtin preset (`burgers-oracle`, `bh-main`,
/// `bh-sweep-1e-1`, `bh-sweep-3e-2`, `bh-sweep-1e-2`).
#[no_mangle]
pub unsafe extern "C" fn bh_config_preset(name: *const c_char, out: *mut *mut BhConfig) -> BhStatus {
    guard(|| {
        let (Some(name), false) = (read_str(name), out.is_null()) else {
            set_error("null or non-UTF8 argument");
            return BhStatus::NullArgument;
        };
        match experiment::preset(name) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(BhConfig(cfg)));
                BhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Load a configuration from a JSON file.
#[no_mangle]
pub unsafe extern "C" fn bh_config_from_file(path: *const c_char, out: *mut *mut BhConfig) -> BhStatus {
    guard(|| {
        let (Some(path), false) = (read_str(path), out.is_null()) else {
            set_error("null or non-UTF8 argument");
            return BhStatus::NullArgument;
        };
        match RunConfig::from_file(Path::new(path)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(BhConfig(cfg)));
                BhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a configuration handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn bh_config_free(cfg: *mut BhConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Execute the full pipeline for a configuration. On success `*out` owns the
/// completed run.
#[no_mangle]
pub unsafe extern "C" fn bh_run_execute(cfg: *const BhConfig, out: *mut *mut BhRun) -> BhStatus {
    guard(|| {
        if cfg.is_null() || out.is_null() {
            set_error("null argument");
            return BhStatus::NullArgument;
        }
        match experiment::run(&(*cfg).0) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(BhRun(result)));
                BhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a run handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn bh_run_free(run: *mut BhRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

unsafe fn scalar_out(out: *mut f64, value: Option<f64>) -> BhStatus {
    if out.is_null() {
        set_error("null output pointer");
        return BhStatus::NullArgument;
    }
    match value {
        Some(v) => {
            *out = v;
            BhStatus::Ok
        }
        None => {
            set_error("quantity unavailable for this run");
            BhStatus::Partial
        }
    }
}

/// Fitted blowup time T*.
#[no_mangle]
pub unsafe extern "C" fn bh_run_t_star(run: *const BhRun, out: *mut f64) -> BhStatus {
    guard(|| {
        if run.is_null() {
            set_error("null run handle");
            return BhStatus::NullArgument;
        }
        scalar_out(out, Some((*run).0.fit.t_star))
    })
}

/// Extrapolated blowup location x*.
#[no_mangle]
pub unsafe extern "C" fn bh_run_x_star(run: *const BhRun, out: *mut f64) -> BhStatus {
    guard(|| {
        if run.is_null() {
            set_error("null run handle");
            return BhStatus::NullArgument;
        }
        scalar_out(out, Some((*run).0.x_star))
    })
}

/// Final-frame rescaling parameter (third derivative at the slope minimum).
#[no_mangle]
pub unsafe extern "C" fn bh_run_nu_hat(run: *const BhRun, out: *mut f64) -> BhStatus {
    guard(|| {
        if run.is_null() {
            set_error("null run handle");
            return BhStatus::NullArgument;
        }
        scalar_out(out, (*run).0.frames.last().map(|f| f.nu_hat))
    })
}

/// Mean cusp exponent of the final snapshot (expected near -2/3).
#[no_mangle]
pub unsafe extern "C" fn bh_run_cusp_exponent(run: *const BhRun, out: *mut f64) -> BhStatus {
    guard(|| {
        if run.is_null() {
            set_error("null run handle");
            return BhStatus::NullArgument;
        }
        scalar_out(out, Some((*run).0.cusp.exponent_mean))
    })
}

/// Maximum relative drift of the conserved L2 norm over the run.
#[no_mangle]
pub unsafe extern "C" fn bh_run_l2_drift(run: *const BhRun, out: *mut f64) -> BhStatus {
    guard(|| {
        if run.is_null() {
            set_error("null run handle");
            return BhStatus::NullArgument;
        }
        scalar_out(out, Some((*run).0.l2_drift))
    })
}

/// Number of bootstrap ledger items in each status bucket.
#[no_mangle]
pub unsafe extern "C" fn bh_run_bootstrap_counts(
    run: *const BhRun,
    pass: *mut usize,
    fail_: *mut usize,
    unchecked: *mut usize,
) -> BhStatus {
    guard(|| {
        if run.is_null() || pass.is_null() || fail_.is_null() || unchecked.is_null() {
            set_error("null argument");
            return BhStatus::NullArgument;
        }
        let b = &(*run).0.bootstrap;
        *pass = b.pass_count;
        *fail_ = b.fail_count;
        *unchecked = b.unchecked_count;
        BhStatus::Ok
    })
}

/// Write every artifact (CSV/JSON/snapshots) of the run into a directory.
#[no_mangle]
pub unsafe extern "C" fn bh_run_write_artifacts(run: *const BhRun, dir: *const c_char) -> BhStatus {
    guard(|| {
        let (Some(dir), false) = (read_str(dir), run.is_null()) else {
            set_error("null or non-UTF8 argument");
            return BhStatus::NullArgument;
        };
        match experiment::write_artifacts(&(*run).0, Path::new(dir)) {
            Ok(_) => BhStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Closed-form self-similar Burgers profile value at X.
#[no_mangle]
pub extern "C" fn bh_profile_value(x: f64) -> f64 {
    bhblow::profile::bar_u(x)
}

/// Rescaled profile with third derivative `nu` at the origin; fails for
/// non-positive `nu`.
#[no_mangle]
pub unsafe extern "C" fn bh_profile_rescaled(nu: f64, x: f64, out: *mut f64) -> BhStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return BhStatus::NullArgument;
        }
        match bhblow::profile::rescaled(nu, x) {
            Ok(v) => {
                *out = v;
                BhStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn bh_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

// Keep `ptr` referenced even on platforms where no helper needs it.
const _: fn() = || {
    let _ = ptr::null::<u8>();
};

//! C ABI for numpost.
//!
//! Every fallible call returns a [`NumpostStatus`]; on failure the message is
//! kept per thread and read back with [`numpost_last_error`]. Results go
//! through out-pointers. Posteriors live behind an opaque handle that the
//! caller frees with [`numpost_posterior_free`]. A handle may move between
//! threads but must not be used from two at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use numpost::bound::{admissible_k0, eabf_upper_bound, KRule};
use numpost::burgers::BurgersParams;
use numpost::experiments::{prepare, ExperimentConfig, Variant};
use numpost::model::{ForwardEvaluator, PosteriorProblem};
use numpost::oracles::{burgers_exact, erfc, logistic_exact, LogisticParams};
use numpost::Error;

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumpostStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    /// The configuration could not be parsed or is inconsistent.
    Config = 4,
    /// A solver or quadrature failed.
    Numerical = 5,
    Io = 6,
    /// The library panicked; this is a bug.
    Panic = 7,
}

/// Which forward solver a posterior handle uses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumpostVariant {
    /// Fixed fine step or grid.
    Fine = 0,
    /// Error-controlled step or grid at the bound's tolerance.
    Adaptive = 1,
}

/// Opaque numerical posterior built from an experiment config.
pub struct NumpostPosterior {
    problem: PosteriorProblem<Box<dyn ForwardEvaluator + Send>>,
    tolerance: f64,
    k0_admissible: f64,
    names: Vec<std::ffi::CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<std::ffi::CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = std::ffi::CString::new(msg.replace('\0', " ")).expect("nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn classify(e: &Error) -> NumpostStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::InvalidArgument(_) | Error::InfeasibleStart => {
            NumpostStatus::InvalidArgument
        }
        Error::InvalidCorrelation(_) | Error::Config(_) | Error::Json(_) => NumpostStatus::Config,
        Error::Io(_) | Error::Csv(_) => NumpostStatus::Io,
        _ => NumpostStatus::Numerical,
    }
}

fn fail(status: NumpostStatus, msg: impl Into<String>) -> NumpostStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, recording any error or panic as the last error.
fn guard(f: impl FnOnce() -> Result<(), NumpostStatus>) -> NumpostStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NumpostStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(NumpostStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn lift<T>(r: numpost::Result<T>) -> Result<T, NumpostStatus> {
    r.map_err(|e| fail(classify(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), NumpostStatus> {
    if p.is_null() {
        Err(fail(NumpostStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn numpost_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (nul-terminated,
/// truncated to `len`). Returns the full message length without the nul, or
/// 0 if there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn numpost_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Clears the last error of this thread.
#[no_mangle]
pub extern "C" fn numpost_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Complementary error function.
#[no_mangle]
pub extern "C" fn numpost_erfc(x: f64) -> f64 {
    erfc(x)
}

/// Closed-form logistic growth `X(t)` with rate `r`, capacity `k`, start `x0`.
#[no_mangle]
pub extern "C" fn numpost_logistic_exact(t: f64, r: f64, k: f64, x0: f64) -> f64 {
    logistic_exact(t, &LogisticParams::new(r, k, x0))
}

/// Viscous Burgers travelling-shock solution `u(z, t)`.
///
/// # Safety
/// `out` must be null or point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn numpost_burgers_exact(
    z: f64,
    t: f64,
    u_left: f64,
    u_right: f64,
    z0: f64,
    epsilon: f64,
    out: *mut f64,
) -> NumpostStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = BurgersParams::new(u_left, u_right, z0, epsilon);
        lift(p.validate())?;
        *out = burgers_exact(z, t, &p);
        Ok(())
    })
}

/// Largest uniform forward-map error `K0` keeping the EABF at `target_eabf`
/// for `n` observations, noise `sigma_star` and correlation factor `factor`
/// (1 for independent noise). A nonzero `two_decimals` rounds `k` down to two
/// decimals.
///
/// # Safety
/// `out` must be null or point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn numpost_admissible_k0(
    n: usize,
    sigma_star: f64,
    factor: f64,
    target_eabf: f64,
    two_decimals: i32,
    out: *mut f64,
) -> NumpostStatus {
    guard(|| {
        non_null(out, "out")?;
        let rule = if two_decimals != 0 { KRule::TwoDecimals } else { KRule::Exact };
        *out = lift(admissible_k0(n, sigma_star, factor, target_eabf, rule))?.k0_admissible;
        Ok(())
    })
}

/// Upper bound on the EABF implied by a uniform forward-map error `k0`.
#[no_mangle]
pub extern "C" fn numpost_eabf_upper_bound(n: usize, sigma_star: f64, k0: f64, factor: f64) -> f64 {
    eabf_upper_bound(n, sigma_star, k0, factor)
}

/// Builds a posterior from a JSON experiment config. Synthetic data are drawn
/// from the config's seed, exactly as the command-line tool does.
///
/// # Safety
/// `config_json` must be null or a nul-terminated string; `out` must be null
/// or point to a writable pointer. On success `*out` owns a new handle.
#[no_mangle]
pub unsafe extern "C" fn numpost_posterior_new(
    config_json: *const c_char,
    variant: NumpostVariant,
    out: *mut *mut NumpostPosterior,
) -> NumpostStatus {
    guard(|| {
        non_null(config_json, "config_json")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| fail(NumpostStatus::InvalidUtf8, e.to_string()))?;
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| fail(NumpostStatus::Config, e.to_string()))?;
        lift(config.validate())?;
        let prepared = lift(prepare(&config))?;
        let variant = match variant {
            NumpostVariant::Fine => Variant::Fine,
            NumpostVariant::Adaptive => Variant::Adaptive,
        };
        let forward = lift(prepared.forward(variant))?;
        let problem = lift(PosteriorProblem::new(prepared.model.clone(), forward))?;
        let names = prepared
            .names()
            .into_iter()
            .map(|n| std::ffi::CString::new(n).expect("parameter names have no nul"))
            .collect();
        let handle = NumpostPosterior {
            problem,
            tolerance: prepared.tolerance,
            k0_admissible: prepared.bound.k0_admissible,
            names,
        };
        *out = Box::into_raw(Box::new(handle));
        Ok(())
    })
}

/// Frees a handle from [`numpost_posterior_new`]. Null is ignored.
///
/// # Safety
/// `handle` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn numpost_posterior_free(handle: *mut NumpostPosterior) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of parameters, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn numpost_posterior_dim(handle: *const NumpostPosterior) -> usize {
    handle.as_ref().map_or(0, |h| h.problem.dim())
}

/// Name of parameter `index` as a nul-terminated string owned by the handle,
/// or null if out of range.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn numpost_posterior_param_name(
    handle: *const NumpostPosterior,
    index: usize,
) -> *const c_char {
    handle.as_ref().and_then(|h| h.names.get(index)).map_or(ptr::null(), |n| n.as_ptr())
}

/// Solver tolerance handed to the adaptive forward map, and the admissible
/// `K0` from the bound (they differ only when the config overrides the
/// tolerance). Either out-pointer may be null.
///
/// # Safety
/// `handle` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn numpost_posterior_tolerance(
    handle: *const NumpostPosterior,
    tolerance: *mut f64,
    k0_admissible: *mut f64,
) -> NumpostStatus {
    guard(|| {
        non_null(handle, "handle")?;
        let h = &*handle;
        if !tolerance.is_null() {
            *tolerance = h.tolerance;
        }
        if !k0_admissible.is_null() {
            *k0_admissible = h.k0_admissible;
        }
        Ok(())
    })
}

/// Unnormalized log-posterior at `theta[0..len]`; `-inf` outside the prior.
/// If `tolerance_met` is not null it receives 1 when the forward solve met
/// its tolerance (always 1 for the fine variant) and 0 otherwise.
///
/// # Safety
/// `handle` must be a live handle, `theta` valid for `len` reads and `out`
/// writable; `tolerance_met` may be null.
#[no_mangle]
pub unsafe extern "C" fn numpost_posterior_log_density(
    handle: *mut NumpostPosterior,
    theta: *const f64,
    len: usize,
    out: *mut f64,
    tolerance_met: *mut i32,
) -> NumpostStatus {
    guard(|| {
        non_null(handle, "handle")?;
        non_null(theta, "theta")?;
        non_null(out, "out")?;
        let h = &mut *handle;
        let theta = std::slice::from_raw_parts(theta, len);
        let v = lift(h.problem.log_posterior(theta, h.tolerance))?;
        *out = v.log_posterior;
        if !tolerance_met.is_null() {
            *tolerance_met = v.solve.map_or(1, |s| i32::from(s.tolerance_met));
        }
        Ok(())
    })
}

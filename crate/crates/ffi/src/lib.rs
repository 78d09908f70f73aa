//! C ABI for the egalloc library: opaque instance handles, status codes,
//! and a thread-local last-error message.
//!
//! Every entry point catches panics and reports them as
//! [`EgalStatus::InternalPanic`] instead of unwinding across the boundary.
//! Output buffers are caller-allocated; the header documents required
//! lengths. The pointer returned by [`egal_last_error`] stays valid until
//! the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use egalloc::deception::{lie_profit, optimal_lie_unlimited};
use egalloc::error::Error;
use egalloc::ga::GAConfig;
use egalloc::io::parse_instance;
use egalloc::model::check_instance;
use egalloc::solver::Solver;
use egalloc::ProblemInstance;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgalStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Input text was not valid UTF-8.
    Utf8 = 2,
    /// Instance or vector text failed to parse.
    Parse = 3,
    /// Parsed input violated a model invariant.
    Validation = 4,
    /// A configuration value was rejected.
    Config = 5,
    /// The exact solver's enumeration budget was exceeded.
    Budget = 6,
    /// A sum-constrained vector could not be renormalized.
    Renormalize = 7,
    /// An I/O error occurred.
    Io = 8,
    /// A buffer was too small for the result.
    BufferTooSmall = 9,
    /// An internal panic was caught at the boundary.
    InternalPanic = 10,
}

/// Opaque handle to a validated problem instance.
pub struct EgalInstance {
    inner: ProblemInstance,
    sum_tolerance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> EgalStatus {
    match err {
        Error::Parse { .. } => EgalStatus::Parse,
        Error::Dimension(_) | Error::Validation(_) => EgalStatus::Validation,
        Error::Config(_) => EgalStatus::Config,
        Error::Budget { .. } => EgalStatus::Budget,
        Error::Renormalize(_) => EgalStatus::Renormalize,
        Error::Io(_) => EgalStatus::Io,
    }
}

fn fail(err: &Error) -> EgalStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Run `body` with panics converted to [`EgalStatus::InternalPanic`].
fn guarded(body: impl FnOnce() -> EgalStatus) -> EgalStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic of unknown type".into());
            set_error(&msg);
            EgalStatus::InternalPanic
        }
    }
}

/// The crate version as a static C string.
#[no_mangle]
pub extern "C" fn egal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The last error message on this thread; empty until an error occurs.
/// Valid until the next failing egalloc call on the same thread.
#[no_mangle]
pub extern "C" fn egal_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse and validate instance text (see the instance file format).
///
/// On success writes a heap-allocated handle to `out`; release it with
/// [`egal_instance_free`]. `sum_tolerance` bounds row-sum deviation in
/// limited mode.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn egal_instance_parse(
    text: *const c_char,
    sum_tolerance: f64,
    out: *mut *mut EgalInstance,
) -> EgalStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            set_error("text and out must be non-null");
            return EgalStatus::NullArgument;
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("instance text is not valid UTF-8");
                return EgalStatus::Utf8;
            }
        };
        let inst = match parse_instance(text) {
            Ok(inst) => inst,
            Err(err) => return fail(&err),
        };
        if let Err(err) = check_instance(&inst, sum_tolerance) {
            return fail(&err);
        }
        let handle = Box::new(EgalInstance { inner: inst, sum_tolerance });
        unsafe { out.write(Box::into_raw(handle)) };
        EgalStatus::Ok
    })
}

/// Release a handle returned by [`egal_instance_parse`]. Null is a no-op.
///
/// # Safety
/// `inst` must be null or a pointer from [`egal_instance_parse`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn egal_instance_free(inst: *mut EgalInstance) {
    if !inst.is_null() {
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Number of agents in the instance; 0 if `inst` is null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn egal_instance_agents(inst: *const EgalInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    unsafe { &*inst }.inner.profile.n_agents()
}

/// Number of resources in the instance; 0 if `inst` is null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn egal_instance_resources(inst: *const EgalInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    unsafe { &*inst }.inner.profile.m_resources()
}

fn write_solution(
    owner: &[usize],
    welfare: f64,
    owners_out: *mut usize,
    owners_len: usize,
    welfare_out: *mut f64,
) -> EgalStatus {
    if owners_len < owner.len() {
        set_error(&format!(
            "owners buffer holds {owners_len} entries but the instance has {} resources",
            owner.len()
        ));
        return EgalStatus::BufferTooSmall;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(owner.as_ptr(), owners_out, owner.len());
        welfare_out.write(welfare);
    }
    EgalStatus::Ok
}

/// Solve the instance exactly; 0 disables the enumeration budget cap.
///
/// Writes the owner of each resource (0-based agent indices) to
/// `owners_out` and the max-min welfare to `welfare_out`.
///
/// # Safety
/// `inst` must be a live handle, `owners_out` must hold at least
/// `owners_len` entries with `owners_len >= egal_instance_resources(inst)`,
/// and `welfare_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn egal_solve_exact(
    inst: *const EgalInstance,
    budget: u64,
    owners_out: *mut usize,
    owners_len: usize,
    welfare_out: *mut f64,
) -> EgalStatus {
    guarded(|| {
        if inst.is_null() || owners_out.is_null() || welfare_out.is_null() {
            set_error("inst, owners_out, and welfare_out must be non-null");
            return EgalStatus::NullArgument;
        }
        let inst = unsafe { &*inst };
        let budget = if budget == 0 { u128::MAX } else { u128::from(budget) };
        match (Solver::Exact { budget }).solve(&inst.inner.profile) {
            Ok((alloc, welfare)) => {
                write_solution(&alloc.owner, welfare, owners_out, owners_len, welfare_out)
            }
            Err(err) => fail(&err),
        }
    })
}

/// Solve the instance with the genetic solver (other knobs at defaults).
///
/// # Safety
/// Same buffer contract as [`egal_solve_exact`].
#[no_mangle]
pub unsafe extern "C" fn egal_solve_llga(
    inst: *const EgalInstance,
    population: usize,
    generations: usize,
    seed: u64,
    owners_out: *mut usize,
    owners_len: usize,
    welfare_out: *mut f64,
) -> EgalStatus {
    guarded(|| {
        if inst.is_null() || owners_out.is_null() || welfare_out.is_null() {
            set_error("inst, owners_out, and welfare_out must be non-null");
            return EgalStatus::NullArgument;
        }
        let inst = unsafe { &*inst };
        let mut cfg = GAConfig::with_defaults(inst.inner.profile.m_resources(), seed);
        cfg.population_size = population;
        cfg.generations = generations;
        match Solver::Llga(cfg).solve(&inst.inner.profile) {
            Ok((alloc, welfare)) => {
                write_solution(&alloc.owner, welfare, owners_out, owners_len, welfare_out)
            }
            Err(err) => fail(&err),
        }
    })
}

/// Profit the liar gains by reporting `lie` instead of its truth, under
/// the exact solver. `lie_len` must equal the resource count.
///
/// # Safety
/// `inst` must be a live handle, `lie` must hold `lie_len` doubles, and
/// `profit_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn egal_lie_profit(
    inst: *const EgalInstance,
    lie: *const f64,
    lie_len: usize,
    profit_out: *mut f64,
) -> EgalStatus {
    guarded(|| {
        if inst.is_null() || lie.is_null() || profit_out.is_null() {
            set_error("inst, lie, and profit_out must be non-null");
            return EgalStatus::NullArgument;
        }
        let inst = unsafe { &*inst };
        let lie = unsafe { std::slice::from_raw_parts(lie, lie_len) };
        match lie_profit(&inst.inner, lie, &Solver::exact(), inst.sum_tolerance) {
            Ok(profit) => {
                unsafe { profit_out.write(profit) };
                EgalStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Closed-form optimal lie for an unlimited instance: a uniform scaling of
/// the truth that keeps the liar just above every rival entry. Writes the
/// lie to `lie_out` and the scale factor to `c_out` (may be null).
///
/// # Safety
/// `inst` must be a live handle and `lie_out` must hold at least `lie_len
/// >= egal_instance_resources(inst)` doubles.
#[no_mangle]
pub unsafe extern "C" fn egal_optimal_lie_unlimited(
    inst: *const EgalInstance,
    lie_out: *mut f64,
    lie_len: usize,
    c_out: *mut f64,
) -> EgalStatus {
    guarded(|| {
        if inst.is_null() || lie_out.is_null() {
            set_error("inst and lie_out must be non-null");
            return EgalStatus::NullArgument;
        }
        let inst = unsafe { &*inst };
        let m = inst.inner.profile.m_resources();
        if lie_len < m {
            set_error(&format!(
                "lie buffer holds {lie_len} entries but the instance has {m} resources"
            ));
            return EgalStatus::BufferTooSmall;
        }
        match optimal_lie_unlimited(&inst.inner.truth, &inst.inner.rival_rows()) {
            Ok(best) => {
                unsafe {
                    std::ptr::copy_nonoverlapping(best.lie.as_ptr(), lie_out, m);
                    if !c_out.is_null() {
                        c_out.write(best.c);
                    }
                }
                EgalStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

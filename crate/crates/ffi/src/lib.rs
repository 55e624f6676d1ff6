//! C ABI over the chroma solvers.
//!
//! Instances are opaque handles created from JSON and released with
//! `chroma_instance_free`. Every fallible call returns a `ChromaStatus`;
//! on failure `chroma_last_error` describes the cause for the calling thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with `chroma_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use chroma::harness::brute_force_optimal;
use chroma::io::parse_instance;
use chroma::report::{solve_report, Algorithm, SolveOptions};
use chroma::{check_solution, normalize_and_validate, Error, SupplierInstance, ValidateOptions};

/// Opaque instance handle.
pub struct ChromaInstance {
    inner: SupplierInstance,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChromaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    /// No solution exists (or none was found for the given limits).
    Infeasible = 5,
    Limit = 6,
    Internal = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> ChromaStatus {
    match err {
        Error::Json(_) | Error::Io(_) => ChromaStatus::Parse,
        Error::SizeLimitExceeded { .. } | Error::GuessSpaceExceeded(_) => ChromaStatus::Limit,
        Error::Internal(_) => ChromaStatus::Internal,
        _ => ChromaStatus::Invalid,
    }
}

fn guarded(f: impl FnOnce() -> Result<ChromaStatus, (ChromaStatus, String)>) -> ChromaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            set_error("");
            status
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside chroma");
            ChromaStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (ChromaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (ChromaStatus, String) {
    (ChromaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn instance_ref<'a>(
    inst: *const ChromaInstance,
) -> Result<&'a SupplierInstance, (ChromaStatus, String)> {
    // SAFETY: caller passes a handle from chroma_instance_from_json or null
    unsafe { inst.as_ref() }
        .map(|i| &i.inner)
        .ok_or_else(|| null("instance"))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), (ChromaStatus, String)> {
    let c =
        CString::new(s).map_err(|_| (ChromaStatus::Internal, "report contains NUL".to_string()))?;
    // SAFETY: out checked non-null by callers
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Parses and validates a JSON instance. On success `*out` holds a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chroma_instance_from_json(
    json: *const c_char,
    out: *mut *mut ChromaInstance,
) -> ChromaStatus {
    guarded(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: non-null, NUL-terminated per contract
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| (ChromaStatus::InvalidUtf8, e.to_string()))?;
        let raw = parse_instance(text).map_err(lib_err)?;
        let inner = normalize_and_validate(&raw, ValidateOptions::default()).map_err(lib_err)?;
        let handle = Box::into_raw(Box::new(ChromaInstance { inner }));
        // SAFETY: out non-null
        unsafe { *out = handle };
        Ok(ChromaStatus::Ok)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `inst` must come from `chroma_instance_from_json` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn chroma_instance_free(inst: *mut ChromaInstance) {
    if !inst.is_null() {
        // SAFETY: ownership returns from the caller
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Number of clients after color normalization; 0 for null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chroma_instance_n_clients(inst: *const ChromaInstance) -> usize {
    unsafe { instance_ref(inst) }.map_or(0, |i| i.space.n_clients())
}

/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chroma_instance_n_facilities(inst: *const ChromaInstance) -> usize {
    unsafe { instance_ref(inst) }.map_or(0, |i| i.space.n_facilities())
}

/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chroma_instance_gamma(inst: *const ChromaInstance) -> usize {
    unsafe { instance_ref(inst) }.map_or(0, |i| i.gamma())
}

unsafe fn solve_into(
    inst: *const ChromaInstance,
    algorithm: Algorithm,
    opts: SolveOptions,
    out_json: *mut *mut c_char,
) -> ChromaStatus {
    guarded(|| {
        let inst = unsafe { instance_ref(inst) }?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let report = solve_report(inst, algorithm, &opts).map_err(lib_err)?;
        let feasible = report.feasible;
        give_string(report.to_json(), out_json)?;
        Ok(if feasible {
            ChromaStatus::Ok
        } else {
            ChromaStatus::Infeasible
        })
    })
}

/// Solves through partitions and cover-promise solvers. Writes the JSON
/// report to `*out_json` for both `Ok` and `Infeasible`.
///
/// # Safety
/// `inst` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chroma_solve_reduction(
    inst: *const ChromaInstance,
    seed: u64,
    reps: u32,
    out_json: *mut *mut c_char,
) -> ChromaStatus {
    let opts = SolveOptions {
        seed,
        reps,
        ..SolveOptions::default()
    };
    unsafe { solve_into(inst, Algorithm::Reduction, opts, out_json) }
}

/// Seven-approximation for knapsack instances; `max_guesses` = 0 selects
/// the default limit.
///
/// # Safety
/// `inst` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chroma_solve_knapsack7(
    inst: *const ChromaInstance,
    max_guesses: u64,
    out_json: *mut *mut c_char,
) -> ChromaStatus {
    let mut opts = SolveOptions::default();
    if max_guesses > 0 {
        opts.max_guesses = max_guesses;
    }
    unsafe { solve_into(inst, Algorithm::Knapsack7, opts, out_json) }
}

/// Optimal radius by enumeration (at most 20 facilities).
///
/// # Safety
/// `inst` must be a live handle and `out_radius` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chroma_brute_force(
    inst: *const ChromaInstance,
    out_radius: *mut u64,
) -> ChromaStatus {
    guarded(|| {
        let inst = unsafe { instance_ref(inst) }?;
        if out_radius.is_null() {
            return Err(null("out_radius"));
        }
        match brute_force_optimal(inst).map_err(lib_err)? {
            Some(opt) => {
                // SAFETY: non-null
                unsafe { *out_radius = opt.radius };
                Ok(ChromaStatus::Ok)
            }
            None => Ok(ChromaStatus::Infeasible),
        }
    })
}

/// Whether facility indices `centers[0..n]` satisfy the constraint and all
/// requirements at `radius`.
///
/// # Safety
/// `inst` must be a live handle, `centers` valid for `n` reads (or null when
/// `n` is 0) and `out_feasible` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chroma_check_solution(
    inst: *const ChromaInstance,
    centers: *const usize,
    n: usize,
    radius: u64,
    out_feasible: *mut bool,
) -> ChromaStatus {
    guarded(|| {
        let inst = unsafe { instance_ref(inst) }?;
        if out_feasible.is_null() {
            return Err(null("out_feasible"));
        }
        let centers: &[usize] = if n == 0 {
            &[]
        } else if centers.is_null() {
            return Err(null("centers"));
        } else {
            // SAFETY: caller guarantees n readable elements
            unsafe { std::slice::from_raw_parts(centers, n) }
        };
        let sol = check_solution(inst, centers, radius).map_err(lib_err)?;
        // SAFETY: non-null
        unsafe { *out_feasible = sol.feasible };
        Ok(ChromaStatus::Ok)
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn chroma_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by CString::into_raw
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failed call on this thread; empty after a call that
/// returned `Ok` or `Infeasible`.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn chroma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chroma_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

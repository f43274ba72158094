//! C ABI for the bound computations: opaque report handles, plain error
//! codes, and UTF-8 strings owned by this library.
//!
//! Conventions:
//! * every function returns an [`ObStatus`] code (or a value documented as
//!   infallible); out-parameters are written only on `Ob_Ok`;
//! * strings returned as `char*` are owned by the library and must be
//!   released with `ob_string_free`; reports with `ob_report_free`;
//! * all entry points catch panics and convert them to `Ob_Panic`.
//!
//! The installed header lives at `include/orthobound.h` and is maintained
//! alongside this file; the `header_sync` test keeps the two in step.

use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use orthobound::report::{compute_bound, BoundReport, Method};
use orthobound::sdp::{Precision, SolverConfig};
use orthobound::Error;

/// Status codes shared with the C header.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObStatus {
    Ok = 0,
    InvalidArgument = 1,
    LimitExceeded = 2,
    SolverFailure = 3,
    FormatError = 4,
    ChainViolation = 5,
    IoError = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Solver options mirrored into C. Zero-initialized fields are replaced by
/// defaults via `ob_solver_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ObSolverOptions {
    pub tolerance: f64,
    pub feasibility_tol: f64,
    pub max_iterations: u32,
    pub step_damping: f64,
    /// 0 = IEEE double, nonzero = double-double.
    pub extended_precision: i32,
    /// 0 = disable the pre-solve equilibration.
    pub equilibrate: i32,
}

/// Opaque bound report handle.
pub struct ObReport(BoundReport);

fn status_of(e: &Error) -> ObStatus {
    match e {
        Error::InvalidArgument(_) => ObStatus::InvalidArgument,
        Error::LimitExceeded(_) => ObStatus::LimitExceeded,
        Error::Solver(_) => ObStatus::SolverFailure,
        Error::Format(_) => ObStatus::FormatError,
        Error::ChainViolation(_) => ObStatus::ChainViolation,
        Error::Io(_) => ObStatus::IoError,
    }
}

fn config_from(options: *const ObSolverOptions) -> SolverConfig {
    if options.is_null() {
        return SolverConfig::default();
    }
    let o = unsafe { &*options };
    SolverConfig {
        tolerance: if o.tolerance > 0.0 { o.tolerance } else { 1e-8 },
        feasibility_tol: if o.feasibility_tol > 0.0 {
            o.feasibility_tol
        } else {
            1e-8
        },
        max_iterations: if o.max_iterations > 0 {
            o.max_iterations as usize
        } else {
            200
        },
        step_damping: if o.step_damping > 0.0 && o.step_damping < 1.0 {
            o.step_damping
        } else {
            0.98
        },
        precision: if o.extended_precision != 0 {
            Precision::Extended
        } else {
            Precision::Double
        },
        equilibrate: o.equilibrate != 0,
        ..SolverConfig::default()
    }
}

/// Library version as a NUL-terminated static string. Infallible.
#[no_mangle]
pub extern "C" fn ob_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Default-initializes an options struct.
///
/// # Safety
/// `out` must be NULL or point to writable storage for one struct.
#[no_mangle]
pub unsafe extern "C" fn ob_solver_options_default(out: *mut ObSolverOptions) -> ObStatus {
    if out.is_null() {
        return ObStatus::NullPointer;
    }
    let d = SolverConfig::default();
    unsafe {
        *out = ObSolverOptions {
            tolerance: d.tolerance,
            feasibility_tol: d.feasibility_tol,
            max_iterations: d.max_iterations as u32,
            step_damping: d.step_damping,
            extended_precision: 0,
            equilibrate: i32::from(d.equilibrate),
        };
    }
    ObStatus::Ok
}

/// Computes one bound.
///
/// `method` is one of "lower", "ratio", "delsarte", "schrijver", "laurent".
/// `forbidden`/`forbidden_len` list forbidden Hamming distances; pass
/// NULL/0 for the distance-n/2 default (n must then be a multiple of 4).
/// On success, `*out_report` owns the result; release with
/// `ob_report_free`.
///
/// # Safety
/// `method` must be a valid NUL-terminated string; `forbidden` must point
/// to `forbidden_len` readable u32 values when non-NULL; `out_report` must
/// be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ob_bound_compute(
    n: u32,
    method: *const c_char,
    forbidden: *const u32,
    forbidden_len: usize,
    options: *const ObSolverOptions,
    out_report: *mut *mut ObReport,
) -> ObStatus {
    if method.is_null() || out_report.is_null() || (forbidden.is_null() && forbidden_len > 0) {
        return ObStatus::NullPointer;
    }
    let result = catch_unwind(AssertUnwindSafe(|| {
        let method = match CStr::from_ptr(method).to_str() {
            Ok(s) => s,
            Err(_) => return Err(Error::invalid("method is not valid UTF-8")),
        };
        let method = Method::from_str(method)?;
        let fset: Option<BTreeSet<u32>> = if forbidden_len > 0 {
            Some(
                std::slice::from_raw_parts(forbidden, forbidden_len)
                    .iter()
                    .copied()
                    .collect(),
            )
        } else {
            None
        };
        let cfg = config_from(options);
        compute_bound(n, method, fset.as_ref(), &cfg)
    }));
    match result {
        Ok(Ok(report)) => {
            *out_report = Box::into_raw(Box::new(ObReport(report)));
            ObStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => ObStatus::Panic,
    }
}

/// Numeric bound value of a report; NaN on NULL.
///
/// # Safety
/// `report` must be NULL or a live handle from `ob_bound_compute`.
#[no_mangle]
pub unsafe extern "C" fn ob_report_value(report: *const ObReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    unsafe { (*report).0.value }
}

/// Integer refinement (largest admissible stable-set size). Writes 0 for
/// lower-bound reports without a refinement.
///
/// # Safety
/// `report` must be NULL or a live handle; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ob_report_refinement(report: *const ObReport, out: *mut u64) -> ObStatus {
    if report.is_null() || out.is_null() {
        return ObStatus::NullPointer;
    }
    unsafe {
        *out = (*report).0.integer_refinement.unwrap_or(0);
    }
    ObStatus::Ok
}

/// Solver iterations recorded in the report.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ob_report_iterations(report: *const ObReport) -> u64 {
    if report.is_null() {
        return 0;
    }
    unsafe { (*report).0.iterations as u64 }
}

/// Whole report as a JSON string (schema orthobound.bound_report.v1).
/// Free with `ob_string_free`.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ob_report_json(report: *const ObReport) -> *mut c_char {
    if report.is_null() {
        return std::ptr::null_mut();
    }
    let json = match serde_json::to_string(unsafe { &(*report).0 }) {
        Ok(s) => s,
        Err(_) => return std::ptr::null_mut(),
    };
    CString::new(json)
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Releases a report handle. NULL is a no-op.
///
/// # Safety
/// `report` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn ob_report_free(report: *mut ObReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn ob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Size of the explicit stable-set construction (exact), n ≡ 0 (mod 4).
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ob_lower_bound_size(n: u32, out: *mut u64) -> ObStatus {
    if out.is_null() {
        return ObStatus::NullPointer;
    }
    match catch_unwind(|| orthobound::bounds::lower_bound_size(n)) {
        Ok(Ok(size)) => match num_to_u64(&size) {
            Some(v) => {
                unsafe { *out = v };
                ObStatus::Ok
            }
            None => ObStatus::LimitExceeded,
        },
        Ok(Err(e)) => status_of(&e),
        Err(_) => ObStatus::Panic,
    }
}

/// ⌊2^n/n⌋ for the distance-n/2 graph (exact), n ≡ 0 (mod 4).
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ob_ratio_bound_floor(n: u32, out: *mut u64) -> ObStatus {
    if out.is_null() {
        return ObStatus::NullPointer;
    }
    match catch_unwind(|| orthobound::bounds::ratio_bound_omega(n)) {
        Ok(Ok(rb)) => match num_to_u64_int(&rb.floor().to_integer()) {
            Some(v) => {
                unsafe { *out = v };
                ObStatus::Ok
            }
            None => ObStatus::LimitExceeded,
        },
        Ok(Err(e)) => status_of(&e),
        Err(_) => ObStatus::Panic,
    }
}

/// ⌈2^n / alpha_upper⌉: a chromatic-number lower bound.
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ob_chromatic_lower_bound(n: u32, alpha_upper: u64, out: *mut u64) -> ObStatus {
    if out.is_null() {
        return ObStatus::NullPointer;
    }
    match catch_unwind(|| orthobound::report::chromatic_bound_from(n, alpha_upper)) {
        Ok(Ok(v)) => {
            unsafe { *out = v };
            ObStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => ObStatus::Panic,
    }
}

fn num_to_u64(v: &orthobound::exports::BigUint) -> Option<u64> {
    use orthobound::exports::ToPrimitive;
    v.to_u64()
}

fn num_to_u64_int(v: &orthobound::exports::BigInt) -> Option<u64> {
    use orthobound::exports::ToPrimitive;
    v.to_u64()
}

/// Exported C symbols; the header-sync test checks the header lists exactly
/// these.
pub const EXPORTED_SYMBOLS: &[&str] = &[
    "ob_version",
    "ob_solver_options_default",
    "ob_bound_compute",
    "ob_report_value",
    "ob_report_refinement",
    "ob_report_iterations",
    "ob_report_json",
    "ob_report_free",
    "ob_string_free",
    "ob_lower_bound_size",
    "ob_ratio_bound_floor",
    "ob_chromatic_lower_bound",
];

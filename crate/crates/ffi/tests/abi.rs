//! Exercises the C ABI from the Rust side: pointer discipline, error
//! codes, and value plumbing.

use std::ffi::{CStr, CString};

use orthobound_ffi::*;

#[test]
fn version_is_a_static_c_string() {
    let v = ob_version();
    assert!(!v.is_null());
    let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
    assert_eq!(s, env!("CARGO_PKG_VERSION"));
}

#[test]
fn options_default_roundtrip() {
    let mut opts = ObSolverOptions {
        tolerance: 0.0,
        feasibility_tol: 0.0,
        max_iterations: 0,
        step_damping: 0.0,
        extended_precision: 0,
        equilibrate: 0,
    };
    assert_eq!(unsafe { ob_solver_options_default(&mut opts) }, ObStatus::Ok);
    assert_eq!(opts.tolerance, 1e-8);
    assert_eq!(opts.max_iterations, 200);
    assert_eq!(opts.equilibrate, 1);
    assert_eq!(
        unsafe { ob_solver_options_default(std::ptr::null_mut()) },
        ObStatus::NullPointer
    );
}

#[test]
fn exact_helpers() {
    let mut out = 0u64;
    unsafe {
        assert_eq!(ob_lower_bound_size(16, &mut out), ObStatus::Ok);
        assert_eq!(out, 2304);
        assert_eq!(ob_ratio_bound_floor(16, &mut out), ObStatus::Ok);
        assert_eq!(out, 4096);
        assert_eq!(ob_chromatic_lower_bound(16, 2304, &mut out), ObStatus::Ok);
        assert_eq!(out, 29);
        // Invalid n propagates a typed error, not a crash.
        assert_eq!(ob_lower_bound_size(10, &mut out), ObStatus::InvalidArgument);
        assert_eq!(
            ob_lower_bound_size(16, std::ptr::null_mut()),
            ObStatus::NullPointer
        );
    }
}

#[test]
fn compute_report_lifecycle() {
    let method = CString::new("schrijver").unwrap();
    let mut report: *mut ObReport = std::ptr::null_mut();
    let status = unsafe {
        ob_bound_compute(
            8,
            method.as_ptr(),
            std::ptr::null(),
            0,
            std::ptr::null(),
            &mut report,
        )
    };
    assert_eq!(status, ObStatus::Ok);
    assert!(!report.is_null());
    let value = unsafe { ob_report_value(report) };
    assert!((value - 32.0).abs() < 1e-3, "{value}");
    let mut refinement = 0u64;
    assert_eq!(
        unsafe { ob_report_refinement(report, &mut refinement) },
        ObStatus::Ok
    );
    assert_eq!(refinement, 32);
    assert!(unsafe { ob_report_iterations(report) } > 0);
    let json = unsafe { ob_report_json(report) };
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let rec: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(rec["method"], "schrijver");
    unsafe {
        ob_string_free(json);
        ob_report_free(report);
    }
}

#[test]
fn compute_with_explicit_forbidden_set() {
    let method = CString::new("delsarte").unwrap();
    let forbidden: Vec<u32> = vec![1, 2];
    let mut report: *mut ObReport = std::ptr::null_mut();
    let status = unsafe {
        ob_bound_compute(
            5,
            method.as_ptr(),
            forbidden.as_ptr(),
            forbidden.len(),
            std::ptr::null(),
            &mut report,
        )
    };
    assert_eq!(status, ObStatus::Ok);
    let value = unsafe { ob_report_value(report) };
    // Single-error-correcting LP bound at n=5: classical value 16/3.
    assert!(value > 1.0 && value < 32.0, "{value}");
    unsafe { ob_report_free(report) };
}

#[test]
fn error_paths_are_typed() {
    let bad = CString::new("sos").unwrap();
    let mut report: *mut ObReport = std::ptr::null_mut();
    let status = unsafe {
        ob_bound_compute(
            16,
            bad.as_ptr(),
            std::ptr::null(),
            0,
            std::ptr::null(),
            &mut report,
        )
    };
    assert_eq!(status, ObStatus::InvalidArgument);
    assert!(report.is_null());
    let method = CString::new("lower").unwrap();
    let status = unsafe {
        ob_bound_compute(
            16,
            method.as_ptr(),
            std::ptr::null(),
            0,
            std::ptr::null(),
            std::ptr::null_mut(),
        )
    };
    assert_eq!(status, ObStatus::NullPointer);
    // Freeing NULL is a no-op.
    unsafe {
        ob_report_free(std::ptr::null_mut());
        ob_string_free(std::ptr::null_mut());
    }
}

#[test]
fn header_sync() {
    let header = include_str!("../include/orthobound.h");
    for sym in EXPORTED_SYMBOLS {
        assert!(
            header.contains(&format!("{sym}(")),
            "header is missing a declaration for {sym}"
        );
    }
    // Every ob_* function named in the header must be exported.
    let mut header_syms: Vec<String> = Vec::new();
    let mut token = String::new();
    for ch in header.chars() {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            token.push(ch);
        } else {
            if ch == '(' && token.starts_with("ob_") {
                header_syms.push(token.clone());
            }
            token.clear();
        }
    }
    header_syms.sort();
    header_syms.dedup();
    for sym in header_syms {
        assert!(
            EXPORTED_SYMBOLS.contains(&sym.as_str()),
            "header declares {sym} which is not exported"
        );
    }
}

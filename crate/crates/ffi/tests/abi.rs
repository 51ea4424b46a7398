use std::ffi::{c_char, CStr, CString};
use std::ptr;

use numpost_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { numpost_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

const LOGISTIC: &str = r#"{"problem":"logistic","sigma":30.0,"seed":7}"#;

#[test]
fn oracles() {
    assert!((numpost_erfc(0.0) - 1.0).abs() < 1e-15);
    assert!((numpost_erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-15);
    assert_eq!(numpost_logistic_exact(0.0, 1.0, 1000.0, 100.0), 100.0);
    let mut u = 0.0;
    let s = unsafe { numpost_burgers_exact(-10.0, 0.0, 2.0, 1.0, 1.0, 0.2, &mut u) };
    assert_eq!(s, NumpostStatus::Ok);
    assert!((u - 2.0).abs() < 1e-12);
}

#[test]
fn bound_matches_known_value() {
    let mut k0 = 0.0;
    let s = unsafe { numpost_admissible_k0(26, 30.0, 1.0, 0.05, 0, &mut k0) };
    assert_eq!(s, NumpostStatus::Ok);
    assert!((k0 - 0.144_613_169_690_25).abs() < 1e-12);
    assert!((numpost_eabf_upper_bound(26, 30.0, k0, 1.0) - 0.05).abs() < 1e-14);
}

#[test]
fn errors_are_reported() {
    let mut k0 = 0.0;
    let s = unsafe { numpost_admissible_k0(0, 30.0, 1.0, 0.05, 0, &mut k0) };
    assert_eq!(s, NumpostStatus::InvalidArgument);
    assert!(last_error().contains("n must be"));
    let s = unsafe { numpost_admissible_k0(26, 30.0, 1.0, 0.05, 0, ptr::null_mut()) };
    assert_eq!(s, NumpostStatus::NullPointer);
    let mut u = 0.0;
    let s = unsafe { numpost_burgers_exact(0.0, 0.0, 1.0, 2.0, 1.0, 0.2, &mut u) };
    assert_eq!(s, NumpostStatus::InvalidArgument);
    numpost_clear_error();
    assert_eq!(unsafe { numpost_last_error(ptr::null_mut(), 0) }, 0);
}

#[test]
fn truncated_error_message() {
    let mut h = ptr::null_mut();
    let bad = CString::new("{").unwrap();
    let s = unsafe { numpost_posterior_new(bad.as_ptr(), NumpostVariant::Fine, &mut h) };
    assert_eq!(s, NumpostStatus::Config);
    assert!(h.is_null());
    let mut buf = [1 as c_char; 4];
    let n = unsafe { numpost_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 3);
    assert_eq!(buf[3], 0);
}

#[test]
fn posterior_handle() {
    let cfg = CString::new(LOGISTIC).unwrap();
    let mut fine = ptr::null_mut();
    let mut adaptive = ptr::null_mut();
    unsafe {
        assert_eq!(numpost_posterior_new(cfg.as_ptr(), NumpostVariant::Fine, &mut fine), NumpostStatus::Ok);
        assert_eq!(numpost_posterior_new(cfg.as_ptr(), NumpostVariant::Adaptive, &mut adaptive), NumpostStatus::Ok);
        assert_eq!(numpost_posterior_dim(fine), 2);
        assert_eq!(CStr::from_ptr(numpost_posterior_param_name(fine, 0)).to_str().unwrap(), "r");
        assert!(numpost_posterior_param_name(fine, 2).is_null());
        let (mut tol, mut k0) = (0.0, 0.0);
        assert_eq!(numpost_posterior_tolerance(adaptive, &mut tol, &mut k0), NumpostStatus::Ok);
        assert_eq!(tol, k0);

        let theta = [1.0, 1000.0];
        let (mut lf, mut la, mut met) = (0.0, 0.0, -1);
        assert_eq!(numpost_posterior_log_density(fine, theta.as_ptr(), 2, &mut lf, ptr::null_mut()), NumpostStatus::Ok);
        assert_eq!(numpost_posterior_log_density(adaptive, theta.as_ptr(), 2, &mut la, &mut met), NumpostStatus::Ok);
        assert!(lf.is_finite() && (lf - la).abs() < 1e-3, "{lf} vs {la}");
        assert_eq!(met, 1);

        let outside = [10.0, 1000.0];
        assert_eq!(numpost_posterior_log_density(fine, outside.as_ptr(), 2, &mut lf, ptr::null_mut()), NumpostStatus::Ok);
        assert_eq!(lf, f64::NEG_INFINITY);
        assert_eq!(
            numpost_posterior_log_density(fine, theta.as_ptr(), 1, &mut lf, ptr::null_mut()),
            NumpostStatus::InvalidArgument
        );

        numpost_posterior_free(fine);
        numpost_posterior_free(adaptive);
        numpost_posterior_free(ptr::null_mut());
        assert_eq!(numpost_posterior_dim(ptr::null()), 0);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(numpost_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

use std::ffi::CStr;
use std::f64::consts::PI;
use std::ptr;

use wysi_ffi::*;

fn last_error() -> String {
    let p = wysi_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn bloch(x: f64, y: f64, z: f64) -> *mut WysiDensity {
    let mut rho = ptr::null_mut();
    assert_eq!(wysi_density_from_bloch(x, y, z, &mut rho), WysiStatus::Ok);
    rho
}

unsafe fn sigma_z() -> *mut WysiObservable {
    let entries = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0];
    let mut k = ptr::null_mut();
    assert_eq!(wysi_observable_new(2, entries.as_ptr(), &mut k), WysiStatus::Ok);
    k
}

#[test]
fn scalar_quantities() {
    unsafe {
        let rho = bloch(0.6, 0.0, 0.0);
        let k = sigma_z();
        let mut v = 0.0;
        assert_eq!(wysi_skew_information(rho, k, &mut v), WysiStatus::Ok);
        assert!((v - 0.2).abs() < 1e-14);
        assert_eq!(wysi_variance(rho, k, &mut v), WysiStatus::Ok);
        assert!((v - 1.0).abs() < 1e-14);
        assert_eq!(wysi_skew_information_dyson(rho, k, 0.5, &mut v), WysiStatus::Ok);
        assert!((v - 0.2).abs() < 1e-13);

        let mixed = bloch(0.0, 0.0, 0.0);
        let up = bloch(0.0, 0.0, 1.0);
        assert_eq!(wysi_affinity(mixed, up, &mut v), WysiStatus::Ok);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(wysi_hellinger_angle(mixed, up, &mut v), WysiStatus::Ok);
        assert!((v - PI / 4.0).abs() < 1e-15);
        assert_eq!(wysi_density_dim(up), 2);

        wysi_density_free(rho);
        wysi_density_free(mixed);
        wysi_density_free(up);
        wysi_observable_free(k);
    }
}

#[test]
fn worked_example_report() {
    unsafe {
        let mut report = ptr::null_mut();
        let s = wysi_worked_example(0.6, 0.0, 1.0, 0.0, 1.0, 0.0, 2.0 * PI, 201, &mut report);
        assert_eq!(s, WysiStatus::Ok);
        assert_eq!(wysi_report_len(report), 201);
        assert_eq!(wysi_report_violations(report), 0);
        let mut m = 0.0;
        assert_eq!(wysi_report_min_margin(report, &mut m), WysiStatus::Ok);
        assert!(m > 0.43);
        let mut p = WysiBoundPoint::default();
        assert_eq!(wysi_report_point(report, 50, &mut p), WysiStatus::Ok);
        assert!((p.cos_hellinger - (0.9 + 0.1 * (2.0 * p.phi).cos())).abs() < 1e-10);
        assert!(!p.violated);
        assert_eq!(wysi_report_point(report, 201, &mut p), WysiStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        wysi_report_free(report);
    }
}

#[test]
fn bound_check_random_instance() {
    unsafe {
        let mut rho = ptr::null_mut();
        let mut k = ptr::null_mut();
        let mut fam = ptr::null_mut();
        let mut report = ptr::null_mut();
        assert_eq!(wysi_density_random(4, 2, 9, &mut rho), WysiStatus::Ok);
        assert_eq!(wysi_observable_random(4, 10, 1.0, &mut k), WysiStatus::Ok);
        assert_eq!(wysi_family_exp(k, 1.0, &mut fam), WysiStatus::Ok);
        assert_eq!(
            wysi_bound_check(rho, fam, 1.0, 0.0, 2.0 * PI, 41, &mut report),
            WysiStatus::Ok
        );
        assert_eq!(wysi_report_len(report), 41);
        assert_eq!(wysi_report_violations(report), 0);
        wysi_report_free(report);
        wysi_family_free(fam);

        let mut axis = ptr::null_mut();
        assert_eq!(wysi_family_axis(0.0, 0.0, 1.0, 1.0, 0.0, 1.0, &mut axis), WysiStatus::Ok);
        let mut report = ptr::null_mut();
        let s = wysi_bound_check(rho, axis, 1.0, 0.0, 1.0, 5, &mut report);
        assert_eq!(s, WysiStatus::DimensionMismatch);
        assert!(report.is_null());
        wysi_family_free(axis);
        wysi_density_free(rho);
        wysi_observable_free(k);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut rho = ptr::null_mut();
        assert_eq!(wysi_density_from_bloch(1.0, 1.0, 0.0, &mut rho), WysiStatus::InvalidArgument);
        assert!(rho.is_null());

        // trace 2
        let entries = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(wysi_density_new(2, entries.as_ptr(), &mut rho), WysiStatus::InvalidTrace);
        // not Hermitian
        let entries = [0.5, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5, 0.0];
        let mut k = ptr::null_mut();
        assert_eq!(wysi_observable_new(2, entries.as_ptr(), &mut k), WysiStatus::NotHermitian);
        // negative eigenvalue
        let entries = [1.5, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0];
        assert_eq!(wysi_density_new(2, entries.as_ptr(), &mut rho), WysiStatus::NotPositive);

        assert_eq!(wysi_density_new(2, ptr::null(), &mut rho), WysiStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut v = 0.0;
        assert_eq!(wysi_skew_information(ptr::null(), ptr::null(), &mut v), WysiStatus::NullPointer);

        let a = bloch(0.1, 0.0, 0.0);
        let z = sigma_z();
        assert_eq!(wysi_skew_information_dyson(a, z, 1.5, &mut v), WysiStatus::InvalidArgument);
        assert_eq!(wysi_skew_information(a, z, ptr::null_mut()), WysiStatus::NullPointer);
        assert_eq!(wysi_skew_information(a, z, &mut v), WysiStatus::Ok);
        assert!(wysi_last_error_message().is_null());

        let mut report = ptr::null_mut();
        assert_eq!(
            wysi_worked_example(1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 5, &mut report),
            WysiStatus::InvalidArgument
        );
        assert_eq!(
            wysi_worked_example(0.5, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1, &mut report),
            WysiStatus::InvalidArgument
        );
        wysi_density_free(a);
        wysi_observable_free(z);
        wysi_density_free(ptr::null_mut());
        assert_eq!(wysi_report_len(ptr::null()), 0);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(wysi_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/wysi.h");
    for name in [
        "wysi_density_new",
        "wysi_density_random",
        "wysi_observable_new",
        "wysi_family_exp",
        "wysi_family_axis",
        "wysi_skew_information",
        "wysi_bound_check",
        "wysi_worked_example",
        "wysi_report_point",
        "wysi_last_error_message",
        "WYSI_STATUS_CROSS_CHECK",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

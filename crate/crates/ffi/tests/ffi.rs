use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use expriesz_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = expriesz_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(expriesz_version()) };
    assert_eq!(v.to_str().unwrap(), expriesz::VERSION);
}

#[test]
fn scan_through_handles() {
    unsafe {
        let mut d = ptr::null_mut();
        let json = cstr(r#"{"intervals": [["0", "1/4"], ["1/2", "3/4"]]}"#);
        assert_eq!(expriesz_domain_from_json(json.as_ptr(), &mut d), ExprieszStatus::Ok);
        let mut m = 0.0;
        assert_eq!(expriesz_domain_measure(d, &mut m), ExprieszStatus::Ok);
        assert_eq!(m, 0.5);

        let mut s = ptr::null_mut();
        let json = cstr(r#"{"cosets": {"period": "4", "offsets": ["0", "1"]}}"#);
        assert_eq!(expriesz_spectrum_from_json(json.as_ptr(), &mut s), ExprieszStatus::Ok);
        let mut len = 0;
        assert_eq!(expriesz_spectrum_window(s, 8.0, ptr::null_mut(), 0, &mut len), ExprieszStatus::BufferTooSmall);
        assert_eq!(len, 9);
        let mut buf = vec![0.0; len];
        assert_eq!(expriesz_spectrum_window(s, 8.0, buf.as_mut_ptr(), buf.len(), &mut len), ExprieszStatus::Ok);
        assert_eq!(buf, [-8.0, -7.0, -4.0, -3.0, 0.0, 1.0, 4.0, 5.0, 8.0]);

        let schedule = [16.0, 32.0, 64.0];
        let mut scan = ptr::null_mut();
        assert_eq!(expriesz_riesz_scan(s, d, schedule.as_ptr(), schedule.len(), &mut scan), ExprieszStatus::Ok);
        assert_eq!(expriesz_scan_len(scan), 3);
        let mut verdict = ExprieszVerdict::Inconclusive;
        assert_eq!(expriesz_scan_verdict(scan, &mut verdict), ExprieszStatus::Ok);
        assert_eq!(verdict, ExprieszVerdict::RieszStable);
        let (mut t, mut n, mut lo, mut hi) = (0.0, 0, 0.0, 0.0);
        assert_eq!(expriesz_scan_row(scan, 2, &mut t, &mut n, &mut lo, &mut hi), ExprieszStatus::Ok);
        assert_eq!(t, 64.0);
        assert!((lo - 0.5).abs() < 1e-8 && (hi - 0.5).abs() < 1e-8);
        assert_eq!(expriesz_scan_row(scan, 3, &mut t, &mut n, &mut lo, &mut hi), ExprieszStatus::InvalidInput);

        expriesz_scan_free(scan);
        expriesz_spectrum_free(s);
        expriesz_domain_free(d);
        expriesz_domain_free(ptr::null_mut());
    }
}

#[test]
fn wkl_and_chebotarev() {
    unsafe {
        let (num, den, cols) = ([0i64, 2], [1i64, 1], [0i64, 2]);
        let mut out = ExprieszWkl { sigma_min: -1.0, sigma_max: -1.0, rank: 0, certificate: -1.0, system_class: ExprieszClass::Frame };
        assert_eq!(expriesz_wkl_analyze(4, 1, num.as_ptr(), den.as_ptr(), 2, cols.as_ptr(), 2, 0.25, &mut out), ExprieszStatus::Ok);
        assert_eq!(out.system_class, ExprieszClass::Neither);
        assert_eq!(out.rank, 1);
        let num = [0i64, 1];
        assert_eq!(expriesz_wkl_analyze(4, 1, num.as_ptr(), den.as_ptr(), 2, cols.as_ptr(), 2, 0.25, &mut out), ExprieszStatus::Ok);
        assert_eq!(out.system_class, ExprieszClass::RieszBasis);
        assert!((out.certificate - 0.5).abs() < 1e-12);

        let mut min = 0.0;
        assert_eq!(expriesz_chebotarev_min(5, false, &mut min), ExprieszStatus::Ok);
        assert!(min > 1e-8);
        assert_eq!(expriesz_chebotarev_min(4, false, &mut min), ExprieszStatus::InvalidInput);
        assert!(last_error().contains("not prime"));
        assert_eq!(expriesz_chebotarev_min(4, true, &mut min), ExprieszStatus::Ok);
        assert!(min < 1e-12);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(expriesz_domain_from_json(ptr::null(), &mut d), ExprieszStatus::NullPointer);
        let bad = cstr(r#"{"intervals": [["1", "0"]]}"#);
        assert_eq!(expriesz_domain_from_json(bad.as_ptr(), &mut d), ExprieszStatus::Parse);
        assert!(d.is_null());
        assert!(last_error().contains("interval"));
        let mut m = 0.0;
        assert_eq!(expriesz_domain_measure(ptr::null(), &mut m), ExprieszStatus::NullPointer);
        let (num, den, cols) = ([0i64, 0], [1i64, 1], [0i64]);
        let mut out = ExprieszWkl { sigma_min: 0.0, sigma_max: 0.0, rank: 0, certificate: 0.0, system_class: ExprieszClass::Frame };
        assert_eq!(expriesz_wkl_analyze(4, 1, num.as_ptr(), den.as_ptr(), 2, cols.as_ptr(), 1, 1.0, &mut out), ExprieszStatus::InvalidInput);
        assert!(last_error().contains("duplicate"));
    }
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/expriesz.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["expriesz_version", "expriesz_riesz_scan", "expriesz_wkl_analyze", "expriesz_scan_free", "ExprieszStatus"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() else {
        return;
    };
    assert!(status.success());
}

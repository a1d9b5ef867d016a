use std::ffi::{CStr, CString};
use std::ptr;

use toric_ma_ffi::*;

fn square() -> *mut ToricBody {
    let coords = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { toric_ma_body_new(2, coords.as_ptr(), 4, &mut b) }, ToricStatus::Ok);
    b
}

fn last_error() -> String {
    let p = toric_ma_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn body_queries() {
    let b = square();
    let mut v = 0.0;
    let mut d = 0;
    unsafe {
        assert_eq!(toric_ma_body_volume(b, &mut v), ToricStatus::Ok);
        assert_eq!(toric_ma_body_dim(b, &mut d), ToricStatus::Ok);
        let x = [2.0, 3.0];
        let mut h = 0.0;
        assert_eq!(toric_ma_body_support(b, x.as_ptr(), 2, &mut h), ToricStatus::Ok);
        assert_eq!(h, 5.0);
        toric_ma_body_free(b);
    }
    assert_eq!(v, 1.0);
    assert_eq!(d, 2);
}

#[test]
fn mixed_volume_and_bm() {
    let json = CString::new(r#"{"dim":2,"vertices":[[1,0],[0,1],[-1,0],[0,-1]]}"#).unwrap();
    let mut diamond = ptr::null_mut();
    let q = square();
    unsafe {
        assert_eq!(toric_ma_body_from_json(json.as_ptr(), &mut diamond), ToricStatus::Ok);
        let list = [q as *const ToricBody, diamond as *const ToricBody];
        let mut mv = 0.0;
        assert_eq!(toric_ma_mixed_volume(list.as_ptr(), 2, &mut mv), ToricStatus::Ok);
        assert!((mv - 2.0).abs() < 1e-9);
        let (mut lhs, mut rhs, mut holds) = (0.0, 0.0, false);
        assert_eq!(toric_ma_bm_check(list.as_ptr(), 2, &mut lhs, &mut rhs, &mut holds), ToricStatus::Ok);
        assert!(holds && (rhs - 2f64.sqrt()).abs() < 1e-12);
        toric_ma_body_free(q);
        toric_ma_body_free(diamond);
    }
}

#[test]
fn support_function_mass() {
    let b = square();
    let mut nodes = Vec::new();
    for i in -2..=2 {
        for j in -2..=2 {
            nodes.extend([i as f64, j as f64]);
        }
    }
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(toric_ma_function_support(b, nodes.as_ptr(), 25, &mut h), ToricStatus::Ok);
        let mut len = 0;
        assert_eq!(toric_ma_function_len(h, &mut len), ToricStatus::Ok);
        let mut masses = vec![0.0; len];
        let (mut total, mut rest) = (0.0, 0.0);
        assert_eq!(toric_ma_function_ma(h, masses.as_mut_ptr(), len, &mut total, &mut rest), ToricStatus::Ok);
        assert!((total - 0.5).abs() < 1e-12);
        assert_eq!(rest, 0.0);
        assert_eq!(toric_ma_function_ma(h, masses.as_mut_ptr(), len - 1, &mut total, &mut rest), ToricStatus::DimensionMismatch);
        let x = [2.0, 3.0];
        let mut v = 0.0;
        assert_eq!(toric_ma_function_eval(h, x.as_ptr(), 2, &mut v), ToricStatus::Ok);
        assert!((v - 5.0).abs() < 1e-12);
        toric_ma_function_free(h);
        toric_ma_body_free(b);
    }
}

#[test]
fn solve_single_atom() {
    let b = square();
    let x = [0.0, 0.0];
    let m = [0.5];
    let mut mu = ptr::null_mut();
    let mut sol = ptr::null_mut();
    let mut residual = f64::NAN;
    unsafe {
        assert_eq!(toric_ma_measure_new(2, x.as_ptr(), m.as_ptr(), 1, &mut mu), ToricStatus::Ok);
        assert_eq!(toric_ma_solve(b, mu, 0.0, 1e-8, &mut sol, &mut residual), ToricStatus::Ok);
        assert!(residual <= 1e-8);
        let mut v = f64::NAN;
        assert_eq!(toric_ma_function_eval(sol, [3.0, -1.0].as_ptr(), 2, &mut v), ToricStatus::Ok);
        assert!((v - 3.0).abs() < 1e-6);
        toric_ma_function_free(sol);

        assert_eq!(toric_ma_solve_aubin_yau(b, mu, 1.0, 0.0, 1e-8, &mut sol, &mut residual), ToricStatus::Ok);
        assert!(residual <= 1e-7);
        toric_ma_function_free(sol);
        toric_ma_measure_free(mu);

        let bad = [0.7];
        assert_eq!(toric_ma_measure_new(2, x.as_ptr(), bad.as_ptr(), 1, &mut mu), ToricStatus::Ok);
        assert_eq!(toric_ma_solve(b, mu, 0.0, 1e-8, &mut sol, &mut residual), ToricStatus::MassMismatch);
        assert!(!last_error().is_empty());
        toric_ma_measure_free(mu);
        toric_ma_body_free(b);
    }
}

#[test]
fn capacity_of_a_point() {
    let coords = [0.0, 1.0];
    let mut b = ptr::null_mut();
    let nodes: Vec<f64> = (-3..=3).map(|k| k as f64).collect();
    let region = CString::new(r#"{"boxes":[{"lo":[0],"hi":[0]}]}"#).unwrap();
    let (mut m, mut e) = (0.0, 0.0);
    unsafe {
        assert_eq!(toric_ma_body_new(1, coords.as_ptr(), 2, &mut b), ToricStatus::Ok);
        assert_eq!(toric_ma_capacity(b, region.as_ptr(), nodes.as_ptr(), nodes.len(), &mut m, &mut e), ToricStatus::Ok);
        toric_ma_body_free(b);
    }
    assert!((m - 0.5).abs() < 1e-12 && (e - 0.5).abs() < 1e-12);
}

#[test]
fn errors_and_null_handling() {
    toric_ma_clear_error();
    assert!(toric_ma_last_error_message().is_null());
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(toric_ma_body_new(2, ptr::null(), 3, &mut b), ToricStatus::NullPointer);
        assert!(last_error().contains("coords"));
        assert_eq!(toric_ma_body_new(4, [0.0; 4].as_ptr(), 1, &mut b), ToricStatus::DimensionMismatch);
        let mut v = 0.0;
        assert_eq!(toric_ma_body_volume(ptr::null(), &mut v), ToricStatus::NullPointer);
        let junk = CString::new("{").unwrap();
        assert_eq!(toric_ma_body_from_json(junk.as_ptr(), &mut b), ToricStatus::InvalidArgument);
        // nonconvex values
        let s = square();
        let nodes = [-1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let values = [0.0, 5.0, 0.0];
        let mut h = ptr::null_mut();
        assert_eq!(toric_ma_function_new(s, nodes.as_ptr(), 3, values.as_ptr(), &mut h), ToricStatus::NonConvex);
        toric_ma_body_free(s);
        toric_ma_body_free(ptr::null_mut());
    }
    let version = unsafe { CStr::from_ptr(toric_ma_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn cli_through_c() {
    let args: Vec<CString> = ["mixed-volume", "--bodies", r#"{"dim":1,"vertices":[[0],[3]]}"#]
        .iter()
        .map(|s| CString::new(*s).unwrap())
        .collect();
    let argv: Vec<*const std::ffi::c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let mut code = -1;
    let (mut out, mut err) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(toric_ma_cli_run(argv.as_ptr(), argv.len(), &mut code, &mut out, &mut err), ToricStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_string();
        toric_ma_string_free(out);
        toric_ma_string_free(err);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["result"]["mv"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/toric_ma.h")).unwrap();
    for name in [
        "TORIC_STATUS_OK",
        "typedef struct ToricBody ToricBody",
        "toric_ma_last_error_message",
        "toric_ma_solve(",
        "toric_ma_capacity(",
        "toric_ma_string_free(",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    // compile-check the header when a C compiler is around
    if let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-Wall", "-Werror"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/toric_ma.h"))
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

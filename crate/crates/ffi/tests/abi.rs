use std::ffi::CStr;
use std::f64::consts::PI;
use std::ptr;

use harper_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe { harper_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_round_trip_matches_core() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { harper_matrix_new(101, 1, &mut m) }, HarperStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { harper_matrix_size(m, &mut n) }, HarperStatus::Ok);
    assert_eq!(n, 101);
    let mut ev = vec![0.0; n];
    assert_eq!(unsafe { harper_matrix_eigenvalues(m, ev.as_mut_ptr(), n) }, HarperStatus::Ok);
    let want = harper_core::spectral::build_harper(101, 1).unwrap().eigenvalues().unwrap();
    assert_eq!(ev, want);
    assert!(ev.iter().sum::<f64>().abs() < 1e-12);
    let mut bound = 0.0;
    assert_eq!(unsafe { harper_matrix_top_bound(m, 5, 5, &mut bound) }, HarperStatus::Ok);
    assert!(ev[0] <= bound && bound < 1.0);
    unsafe { harper_matrix_free(m) };
}

#[test]
fn errors_are_reported_not_panicked() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { harper_matrix_new(2, 1, &mut m) }, HarperStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { harper_matrix_new(8, 1, ptr::null_mut()) }, HarperStatus::NullPointer);
    assert_eq!(unsafe { harper_matrix_size(ptr::null(), &mut 0) }, HarperStatus::NullPointer);

    assert_eq!(unsafe { harper_matrix_new(8, 1, &mut m) }, HarperStatus::Ok);
    let mut small = [0.0; 4];
    assert_eq!(unsafe { harper_matrix_eigenvalues(m, small.as_mut_ptr(), 4) }, HarperStatus::BufferTooSmall);
    assert!(last_error().contains("need 8"));
    unsafe { harper_matrix_free(m) };
    unsafe { harper_matrix_free(ptr::null_mut()) };

    let mut x = 0.0;
    assert_eq!(unsafe { harper_elliptic_k(1.0, &mut x) }, HarperStatus::InvalidArgument);
    assert_eq!(unsafe { harper_bulk_density(f64::NAN, &mut x) }, HarperStatus::InvalidArgument);
}

#[test]
fn success_clears_error_and_truncation_is_safe() {
    let mut x = 0.0;
    assert_ne!(unsafe { harper_elliptic_k(-1.0, &mut x) }, HarperStatus::Ok);
    let full = unsafe { harper_last_error(ptr::null_mut(), 0) };
    assert!(full > 4);
    let mut buf = [1 as std::ffi::c_char; 4];
    assert_eq!(unsafe { harper_last_error(buf.as_mut_ptr(), 4) }, full);
    assert_eq!(buf[3], 0);
    assert_eq!(unsafe { harper_elliptic_k(0.0, &mut x) }, HarperStatus::Ok);
    assert_eq!(x, PI / 2.0);
    assert_eq!(unsafe { harper_last_error(ptr::null_mut(), 0) }, 0);
}

#[test]
fn scalar_functions() {
    let mut x = 0.0;
    assert_eq!(unsafe { harper_bulk_density(0.0, &mut x) }, HarperStatus::Ok);
    assert!(x.is_infinite());
    assert_eq!(unsafe { harper_bulk_density(2.0, &mut x) }, HarperStatus::Ok);
    assert_eq!(x, 0.0);
    assert_eq!(unsafe { harper_lambda_star(64, 1, &mut x) }, HarperStatus::Ok);
    assert!((x - harper_core::absorbing::dense_lambda_star(64, 1).unwrap()).abs() < 1e-15);
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/harper.h")).unwrap();
    for name in [
        "harper_matrix_new",
        "harper_matrix_free",
        "harper_matrix_size",
        "harper_matrix_eigenvalues",
        "harper_matrix_top_bound",
        "harper_lambda_star",
        "harper_elliptic_k",
        "harper_bulk_density",
        "harper_last_error",
        "HARPER_STATUS_BUFFER_TOO_SMALL",
        "typedef struct HarperMatrix HarperMatrix",
    ] {
        assert!(h.contains(name), "{name}");
    }
}

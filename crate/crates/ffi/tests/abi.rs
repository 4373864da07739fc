use std::ffi::{CStr, CString};
use std::ptr;

use sasaki_ffi::*;

fn model_path(name: &str) -> CString {
    CString::new(format!("{}/../core/models/{name}.toml", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn open(name: &str) -> *mut SasakiModel {
    let mut handle = ptr::null_mut();
    let status = unsafe { sasaki_model_open(model_path(name).as_ptr(), &mut handle) };
    assert_eq!(status, SasakiStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    let msg = sasaki_last_error();
    assert!(!msg.is_null());
    unsafe { CStr::from_ptr(msg) }.to_str().unwrap().to_string()
}

#[test]
fn unit_tangent_sphere_round_trip() {
    let model = open("tangent-sphere");
    let (mut n, mut m) = (0usize, 0usize);
    let mut scalar = 0.0;
    unsafe {
        assert_eq!(sasaki_model_dims(model, &mut n, &mut m), SasakiStatus::Ok);
        assert_eq!(sasaki_model_scalar_curvature(model, &mut scalar), SasakiStatus::Ok);
    }
    assert_eq!((n, m), (2, 2));
    assert!((scalar - 1.5).abs() < 1e-12);

    // Horizontal e1 and the vertical direction orthogonal to the first axis.
    let first = [1.0, 0.0, 0.0, 0.0];
    let second = [0.0, 0.0, 0.0, 1.0];
    let mut k = 0.0;
    let status = unsafe { sasaki_model_sectional(model, first.as_ptr(), second.as_ptr(), 4, &mut k) };
    assert_eq!(status, SasakiStatus::Ok);
    assert!((k - 0.25).abs() < 1e-12);
    unsafe { sasaki_model_free(model) };
}

#[test]
fn report_json_is_returned_and_freed() {
    let model = open("atiyah-sphere");
    let mut text = ptr::null_mut();
    let status = unsafe { sasaki_model_report_json(model, 16, 2718, &mut text) };
    assert_eq!(status, SasakiStatus::Ok);
    let json = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_string();
    assert!(json.contains("\"31/8\""), "{json}");
    unsafe {
        sasaki_string_free(text);
        sasaki_model_free(model);
    }
}

#[test]
fn parse_errors_carry_a_position() {
    let source = CString::new("mode = \"exact\"\n[base]\nkind = 3\n").unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { sasaki_model_parse(source.as_ptr(), &mut handle) };
    assert_eq!(status, SasakiStatus::Parse);
    assert!(handle.is_null());
    assert!(last_error().contains("line 3"), "{}", last_error());
}

#[test]
fn bad_arguments_are_reported_not_crashed() {
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { sasaki_model_parse(ptr::null(), &mut handle) }, SasakiStatus::NullPointer);
    let missing = CString::new("/no/such/model.toml").unwrap();
    assert_eq!(unsafe { sasaki_model_open(missing.as_ptr(), &mut handle) }, SasakiStatus::Io);

    let model = open("tangent-sphere");
    let v = [1.0, 0.0, 0.0];
    let mut k = 0.0;
    let status = unsafe { sasaki_model_sectional(model, v.as_ptr(), v.as_ptr(), 3, &mut k) };
    assert_eq!(status, SasakiStatus::InvalidInput);
    assert!(last_error().contains("dimension mismatch"));
    let same = [1.0, 0.0, 0.0, 0.0];
    let status = unsafe { sasaki_model_sectional(model, same.as_ptr(), same.as_ptr(), 4, &mut k) };
    assert_eq!(status, SasakiStatus::Degenerate);
    unsafe {
        sasaki_model_free(model);
        sasaki_model_free(ptr::null_mut());
        sasaki_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_suites_run_through_the_abi() {
    let suite = CString::new("milnor-tables").unwrap();
    let mut passed = 0;
    assert_eq!(unsafe { sasaki_verify(suite.as_ptr(), 1, &mut passed) }, SasakiStatus::Ok);
    assert_eq!(passed, 1);
    let unknown = CString::new("no-such-suite").unwrap();
    assert_eq!(unsafe { sasaki_verify(unknown.as_ptr(), 1, &mut passed) }, SasakiStatus::Unsupported);
}

#[test]
fn header_declares_the_exported_functions() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sasaki.h")).unwrap();
    for name in [
        "sasaki_last_error",
        "sasaki_model_parse",
        "sasaki_model_open",
        "sasaki_model_free",
        "sasaki_model_dims",
        "sasaki_model_scalar_curvature",
        "sasaki_model_sectional",
        "sasaki_model_report_json",
        "sasaki_verify",
        "sasaki_string_free",
        "typedef struct SasakiModel SasakiModel",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hurwitz_tr_ffi::*;

const CURVE_A: &str = r#"{"G":["1","1"],"S":["0","0","1/2"],"gamma":"1"}"#;

fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { ht_string_free(p) };
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ht_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn curve_handle_roundtrip() {
    let cfg = CString::new(CURVE_A).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { ht_curve_new(cfg.as_ptr(), &mut c) }, HtStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ht_curve_json(c, &mut out) }, HtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["phi"], serde_json::json!(["1", "0", "-1"]));
    unsafe { ht_curve_free(c) };
}

#[test]
fn recursion_handle_matches_oracle() {
    let cfg = CString::new(CURVE_A).unwrap();
    let (mut c, mut r, mut out) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(ht_curve_new(cfg.as_ptr(), &mut c), HtStatus::Ok);
        assert_eq!(ht_recursion_new(c, &mut r), HtStatus::Ok);
        ht_curve_free(c);
        assert_eq!(ht_recursion_omega(r, 0, 3, &mut out), HtStatus::Ok);
    }
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(unsafe { ht_recursion_hurwitz(r, 1, 1, 4, &mut out) }, HtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["agrees"], true);
    assert_eq!(unsafe { ht_recursion_omega(r, 0, 2, &mut out) }, HtStatus::Invalid);
    assert!(last_error().contains("not stable"));
    unsafe { ht_recursion_free(r) };
}

#[test]
fn hurwitz_rows() {
    let (g, mu, nu) = (CString::new("1").unwrap(), CString::new("2").unwrap(), CString::new("2").unwrap());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ht_hurwitz(g.as_ptr(), mu.as_ptr(), nu.as_ptr(), 0, false, &mut out) }, HtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v[0]["value"], "1/2");
    assert_eq!(v[0]["genus"], 0);
    let bad = CString::new("2,x").unwrap();
    assert_eq!(unsafe { ht_hurwitz(g.as_ptr(), bad.as_ptr(), nu.as_ptr(), 0, false, &mut out) }, HtStatus::Parse);
    let three = CString::new("3").unwrap();
    assert_eq!(unsafe { ht_hurwitz(g.as_ptr(), three.as_ptr(), nu.as_ptr(), 0, false, &mut out) }, HtStatus::Parse);
}

#[test]
fn error_codes() {
    let mut c = ptr::null_mut();
    let bad = CString::new("{\"G\":").unwrap();
    assert_eq!(unsafe { ht_curve_new(bad.as_ptr(), &mut c) }, HtStatus::Parse);
    assert!(last_error().starts_with("parse error"));
    let degenerate = CString::new(r#"{"G":["1","1"],"S":["0","1"],"gamma":"1"}"#).unwrap();
    assert_eq!(unsafe { ht_curve_new(degenerate.as_ptr(), &mut c) }, HtStatus::Invalid);
    let suite = CString::new("nope").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ht_verify(suite.as_ptr(), 0, &mut out) }, HtStatus::Parse);
    assert_eq!(unsafe { ht_curve_json(ptr::null(), &mut out) }, HtStatus::NullPointer);
}

#[test]
fn verify_suite_report() {
    let suite = CString::new("cd").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ht_verify(suite.as_ptr(), 7, &mut out) }, HtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["suite"], "cd");
    assert_eq!(v["residualZero"], true);
    assert_eq!(v["maxOrderChecked"], 8);
}

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/capi-… → target/<profile>/libhurwitz_tr_ffi.a
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libhurwitz_tr_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hurwitz_tr.h")).unwrap();
    for f in ["ht_curve_new", "ht_curve_free", "ht_recursion_omega", "ht_hurwitz", "ht_verify", "ht_last_error", "HT_STATUS_CHECK_FAILED"] {
        assert!(h.contains(f), "{f} missing from the header");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(lib) = static_lib() else {
        eprintln!("static library not found next to the test binary; skipping");
        return;
    };
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let bin = Path::new(env!("CARGO_TARGET_TMPDIR")).join("roundtrip");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/roundtrip.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "cc failed"),
        Err(e) => {
            eprintln!("no C compiler ({e}); skipping");
            return;
        }
    }
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}

use std::ffi::{CStr, CString};
use std::ptr;

use qnahm_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null(), "null string: {}", last_error());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { qn_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qn_last_error()) }.to_string_lossy().into_owned()
}

fn rr_sum(order: i64) -> *mut QnSeries {
    let a = [2i64];
    let mut s = ptr::null_mut();
    let st = unsafe { qn_nahm_sum(1, a.as_ptr(), ptr::null(), ptr::null(), ptr::null(), 0, 1, order, &mut s) };
    assert_eq!(st, QnStatus::Ok);
    s
}

#[test]
fn nahm_sum_coefficients() {
    let s = rr_sum(20);
    // Σ q^{n²}/(q)_n = 1 + q + q² + q³ + 2q⁴ + 2q⁵ + 3q⁶ + ...
    let want = ["1", "1", "1", "1", "2", "2", "3", "3", "4", "5"];
    for (e, w) in want.iter().enumerate() {
        assert_eq!(take(unsafe { qn_series_coeff_str(s, 0, e as i64, 1) }), *w);
    }
    assert!(unsafe { qn_series_coeff_str(s, 0, 20, 1) }.is_null());
    assert!(last_error().contains("truncation"));
    let json = take(unsafe { qn_series_json(s) });
    assert!(json.starts_with("{\"trunc\""));
    unsafe { qn_series_free(s) };
}

#[test]
fn spec_sides_agree_with_direct_sum() {
    let text = CString::new("identity \"rr\" { matrix = [[2]]; rhs = P(1, 1, 5)^-1 * P(1, 4, 5)^-1; order = 30; }").unwrap();
    let (mut l, mut r) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { qn_expand_spec(text.as_ptr(), 0, 0, &mut l) }, QnStatus::Ok);
    assert_eq!(unsafe { qn_expand_spec(text.as_ptr(), 1, 0, &mut r) }, QnStatus::Ok);
    let d = rr_sum(30);
    unsafe {
        assert_eq!(qn_series_equal(l, r), 1);
        assert_eq!(qn_series_equal(l, d), 1);
        assert_eq!(qn_series_equal(l, ptr::null()), -1);
        qn_series_free(l);
        qn_series_free(r);
        qn_series_free(d);
    }
}

#[test]
fn verify_builtin_reports() {
    let fam = CString::new("thm11").unwrap();
    let params = CString::new(r#"{"k": 3, "lambda": 1, "which": "3"}"#).unwrap();
    let mut rep = ptr::null_mut();
    let st = unsafe { qn_verify_builtin(fam.as_ptr(), params.as_ptr(), 20, false, &mut rep) };
    assert_eq!(st, QnStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { qn_report_status(rep) }, QnStatus::Ok);
    let json = take(unsafe { qn_report_json(rep) });
    assert!(json.contains("\"status\":\"match\""), "{json}");
    unsafe { qn_report_free(rep) };

    let fam = CString::new("nonesuch").unwrap();
    let st = unsafe { qn_verify_builtin(fam.as_ptr(), ptr::null(), 0, false, &mut rep) };
    assert_eq!(st, QnStatus::InvalidSpec);
    assert!(last_error().contains("nonesuch"));
    unsafe { qn_report_free(rep) };

    let bad = CString::new("{not json").unwrap();
    let st = unsafe { qn_verify_builtin(fam.as_ptr(), bad.as_ptr(), 0, false, &mut rep) };
    assert_eq!(st, QnStatus::ParseError);
    assert!(rep.is_null());
}

#[test]
fn spec_errors_map_to_status_codes() {
    let mut json = ptr::null_mut();
    let parse = CString::new("identity \"x\" { matrix = [[2]] rhs = invq; }").unwrap();
    assert_eq!(unsafe { qn_verify_spec_json(parse.as_ptr(), 0, &mut json) }, QnStatus::ParseError);
    assert!(json.is_null());
    assert!(last_error().contains(":1:"), "{}", last_error());
    let semantic = CString::new("identity \"x\" { matrix = [[0]]; rhs = invq; }").unwrap();
    assert_eq!(unsafe { qn_verify_spec_json(semantic.as_ptr(), 0, &mut json) }, QnStatus::InvalidSpec);
    assert!(last_error().contains("pivot"));
    let wrong = CString::new("identity \"x\" { matrix = [[2]]; rhs = invq; order = 8; }").unwrap();
    assert_eq!(unsafe { qn_verify_spec_json(wrong.as_ptr(), 0, &mut json) }, QnStatus::Mismatch);
    let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(v[0]["status"], "mismatch");
}

#[test]
fn null_and_invalid_arguments() {
    unsafe {
        assert_eq!(qn_nahm_sum(1, ptr::null(), ptr::null(), ptr::null(), ptr::null(), 0, 1, 5, ptr::null_mut()), QnStatus::NullPointer);
        let mut s = ptr::null_mut();
        assert_eq!(qn_nahm_sum(1, ptr::null(), ptr::null(), ptr::null(), ptr::null(), 0, 1, 5, &mut s), QnStatus::NullPointer);
        let a = [1i64, 2, 2, 1];
        assert_eq!(qn_nahm_sum(2, a.as_ptr(), ptr::null(), ptr::null(), ptr::null(), 0, 1, 5, &mut s), QnStatus::InvalidSpec);
        assert!(s.is_null());
        assert!(last_error().contains("positive definite"));
        let zero = [0i64];
        assert_eq!(qn_nahm_sum(1, a.as_ptr(), zero.as_ptr(), ptr::null(), ptr::null(), 0, 1, 5, &mut s), QnStatus::InvalidSpec);
        assert_eq!(qn_expand_spec(ptr::null(), 0, 0, &mut s), QnStatus::NullPointer);
        let bytes = [0xffu8, 0];
        assert_eq!(qn_expand_spec(bytes.as_ptr().cast(), 0, 0, &mut s), QnStatus::InvalidUtf8);
        assert!(qn_series_json(ptr::null()).is_null());
        assert_eq!(qn_report_status(ptr::null()), QnStatus::NullPointer);
        qn_series_free(ptr::null_mut());
        qn_report_free(ptr::null_mut());
        qn_string_free(ptr::null_mut());
        let v = CStr::from_ptr(qn_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_declares_every_export_and_compiles_as_c() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/qnahm.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
        }
    }
    // a C compiler is optional; when present the header must compile cleanly
    let tmp = tempfile::tempdir().unwrap();
    let c = tmp.path().join("t.c");
    std::fs::write(&c, "#include \"qnahm.h\"\nint main(void) { return QN_STATUS_OK; }\n").unwrap();
    match std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&c)
        .output()
    {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(_) => eprintln!("no C compiler; syntax check skipped"),
    }
}

use std::ffi::{CStr, CString};
use std::ptr;

use gectool_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut libc::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    gt_string_free(p);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gt_last_error()).to_str().unwrap().to_string() }
}

#[test]
fn f_beta_values() {
    let mut f = 0.0;
    unsafe {
        assert_eq!(gt_f_beta(0.7442, 0.7092, 0.5, &mut f), GtStatus::Ok);
        assert!((f - 0.7371).abs() < 5e-4);
        assert_eq!(gt_f_beta(0.5, 0.5, -1.0, &mut f), GtStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        assert_eq!(gt_f_beta(0.5, 0.5, 1.0, ptr::null_mut()), GtStatus::NullPointer);
        assert_eq!(gt_f_beta(0.5, 0.5, 1.0, &mut f), GtStatus::Ok);
        assert_eq!(last_error(), "");
    }
}

#[test]
fn error_rate_and_cost() {
    let mut rate = 0.0;
    let mut cost = 0usize;
    unsafe {
        assert_eq!(
            gt_error_rate(c("a b c d").as_ptr(), c("a x c").as_ptr(), &mut rate),
            GtStatus::Ok
        );
        assert_eq!(rate, 0.5);
        assert_eq!(
            gt_align_cost(c("a b c d").as_ptr(), c("a x c").as_ptr(), &mut cost),
            GtStatus::Ok
        );
        assert_eq!(cost, 2);
        assert_eq!(
            gt_error_rate(c("").as_ptr(), c("").as_ptr(), &mut rate),
            GtStatus::Undefined
        );
        assert_eq!(
            gt_error_rate(ptr::null(), c("").as_ptr(), &mut rate),
            GtStatus::NullPointer
        );
    }
}

#[test]
fn invalid_utf8() {
    let bad = CString::new(vec![0xffu8, 0xfe]).unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(gt_tokenize(bad.as_ptr(), &mut out), GtStatus::InvalidUtf8);
    }
    assert!(out.is_null());
}

#[test]
fn extract_matches_core() {
    let mut out = ptr::null_mut();
    let text = unsafe {
        assert_eq!(
            gt_extract_m2(c("A B C D").as_ptr(), c("A D B C").as_ptr(), true, &mut out),
            GtStatus::Ok
        );
        take(out)
    };
    let src = gectool::Sentence::from_tokenized("A B C D");
    let tgt = gectool::Sentence::from_tokenized("A D B C");
    let record = gectool::m2::from_parallel(&src, &tgt, 0, &Default::default());
    assert_eq!(text, gectool::emit_m2(&[record]).unwrap());
    assert!(text.contains("A 1 4|||unspec|||D B C|||"));
}

#[test]
fn noiser_handle() {
    let mut noiser = ptr::null_mut();
    unsafe {
        assert_eq!(
            gt_noiser_new(ptr::null(), ptr::null(), 0, ptr::null(), &mut noiser),
            GtStatus::NullPointer
        );
        let profile = c(r#"{"token_ops": {"substitute": 0, "insert": 0, "delete": 1, "swap": 0, "recase": 0}}"#);
        assert_eq!(
            gt_noiser_new(c("en").as_ptr(), profile.as_ptr(), 5, ptr::null(), &mut noiser),
            GtStatus::Ok
        );
        let mut out = ptr::null_mut();
        let sentence = c("the cat sat on the mat");
        assert_eq!(
            gt_noiser_corrupt(noiser, sentence.as_ptr(), 3, true, &mut out),
            GtStatus::Ok
        );
        let first = take(out);
        assert_eq!(
            gt_noiser_corrupt(noiser, sentence.as_ptr(), 3, true, &mut out),
            GtStatus::Ok
        );
        assert_eq!(take(out), first);
        gt_noiser_free(noiser);
        gt_noiser_free(ptr::null_mut());
    }
}

#[test]
fn scorer_handle() {
    let mut scorer = ptr::null_mut();
    unsafe {
        assert_eq!(gt_scorer_new(0.5, &mut scorer), GtStatus::Ok);
        let gold = c("S a b c\nA 1 2|||R|||x|||REQUIRED|||-NONE-|||0\n\n");
        assert_eq!(gt_scorer_add(scorer, gold.as_ptr(), c("a x c").as_ptr()), GtStatus::Ok);
        assert_eq!(gt_scorer_add(scorer, gold.as_ptr(), c("a b c").as_ptr()), GtStatus::Ok);
        assert_eq!(
            gt_scorer_add(scorer, c("garbage").as_ptr(), c("a").as_ptr()),
            GtStatus::Parse
        );
        let mut out = ptr::null_mut();
        assert_eq!(gt_scorer_report_json(scorer, &mut out), GtStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["tp"], 1);
        assert_eq!(report["fn"], 1);
        gt_scorer_free(scorer);
    }
}

#[test]
fn header_declares_the_surface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gectool.h")).unwrap();
    for name in [
        "gt_last_error",
        "gt_string_free",
        "gt_f_beta",
        "gt_error_rate",
        "gt_tokenize",
        "gt_extract_m2",
        "gt_noiser_new",
        "gt_noiser_corrupt",
        "gt_noiser_free",
        "gt_scorer_new",
        "gt_scorer_add",
        "gt_scorer_report_json",
        "gt_scorer_free",
        "typedef struct GtNoiser GtNoiser;",
        "GT_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

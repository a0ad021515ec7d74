use std::ffi::{CStr, CString};
use std::ptr;

use cuspforge_ffi::*;
use serde_json::Value;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    cf_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = cf_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn catalog(key: &str) -> *mut CfConfiguration {
    let mut h = ptr::null_mut();
    assert_eq!(cf_configuration_catalog(cs(key).as_ptr(), &mut h), CfStatus::Ok);
    h
}

#[test]
fn catalog_summaries() {
    unsafe {
        for (key, n, sing) in [("hirzebruch", 4, 1), ("d14", 4, 1), ("holzapfel", 6, 3)] {
            let h = catalog(key);
            assert_eq!(cf_configuration_len(h), n);
            let mut s = CfSingularSummary::default();
            assert_eq!(cf_singular_locus(h, &mut s), CfStatus::Ok);
            assert_eq!(s.components, n);
            assert_eq!(s.singular_points, sing);
            assert_eq!(s.incidence_sum, 4 * sing);
            assert!(s.proportional && s.intersecting && !s.vacuous);

            let mut j = ptr::null_mut();
            assert_eq!(cf_singular_locus_json(h, &mut j), CfStatus::Ok);
            let v: Value = serde_json::from_str(&take(j)).unwrap();
            assert_eq!(v["e"], sing);
            cf_configuration_free(h);
        }
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let h = catalog("holzapfel");
        let mut j = ptr::null_mut();
        assert_eq!(cf_configuration_to_json(h, &mut j), CfStatus::Ok);
        let first = take(j);
        cf_configuration_free(h);

        let mut h2 = ptr::null_mut();
        let text = cs(&first);
        assert_eq!(cf_configuration_from_json(text.as_ptr(), &mut h2), CfStatus::Ok);
        let mut j = ptr::null_mut();
        assert_eq!(cf_configuration_to_json(h2, &mut j), CfStatus::Ok);
        assert_eq!(take(j), first);
        cf_configuration_free(h2);
    }
}

#[test]
fn pullback_multiplies_the_euler_number_by_the_degree() {
    unsafe {
        let h = catalog("hirzebruch");
        let mut p = ptr::null_mut();
        let st = cf_pullback(h, cs("1+1w").as_ptr(), cs("1").as_ptr(), 1, 1, &mut p);
        assert_eq!(st, CfStatus::Ok);
        let mut s = CfSingularSummary::default();
        assert_eq!(cf_singular_locus(p, &mut s), CfStatus::Ok);
        assert_eq!((s.components, s.singular_points), (6, 3));
        assert!(s.proportional);
        cf_configuration_free(p);

        let st = cf_pullback(h, cs("0").as_ptr(), cs("1").as_ptr(), 1, 1, &mut p);
        assert_eq!(st, CfStatus::InvalidInput);
        assert!(last_error().contains("nonzero"));
        cf_configuration_free(h);
    }
}

#[test]
fn pullback_rejects_non_proportional_input() {
    unsafe {
        let text = cs(r#"{"d": 3, "curves": [
            {"slope": [{"d":3,"x":1,"y":0},{"d":3,"x":0,"y":0}]},
            {"slope": [{"d":3,"x":0,"y":0},{"d":3,"x":1,"y":0}]}]}"#);
        let mut h = ptr::null_mut();
        assert_eq!(cf_configuration_from_json(text.as_ptr(), &mut h), CfStatus::Ok);
        let mut s = CfSingularSummary::default();
        assert_eq!(cf_singular_locus(h, &mut s), CfStatus::Ok);
        assert!(!s.proportional);
        let mut p = ptr::null_mut();
        let st = cf_pullback(h, cs("1").as_ptr(), cs("1").as_ptr(), 1, 1, &mut p);
        assert_eq!(st, CfStatus::NotProportional);
        assert!(p.is_null());
        cf_configuration_free(h);
    }
}

#[test]
fn series_recipe() {
    unsafe {
        let r = cs(r#"{"base": "hirzebruch", "gammas": [{"d":3,"x":1,"y":1}, {"d":3,"x":1,"y":1}]}"#);
        let mut j = ptr::null_mut();
        assert_eq!(cf_series_json(r.as_ptr(), &mut j), CfStatus::Ok);
        let v: Value = serde_json::from_str(&take(j)).unwrap();
        assert_eq!(v["base"]["e"], 1);
        let e: Vec<i64> = v["terms"].as_array().unwrap().iter().map(|r| r["e"].as_i64().unwrap()).collect();
        assert_eq!(e, [3, 9]);

        let bad = cs("{");
        assert_eq!(cf_series_json(bad.as_ptr(), &mut j), CfStatus::InvalidInput);
    }
}

#[test]
fn errors_and_null_pointers() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(cf_configuration_catalog(cs("nope").as_ptr(), &mut h), CfStatus::InvalidInput);
        assert!(h.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(cf_configuration_from_json(cs("{ nope").as_ptr(), &mut h), CfStatus::InvalidInput);
        assert_eq!(cf_configuration_from_json(ptr::null(), &mut h), CfStatus::NullPointer);
        assert_eq!(
            cf_configuration_catalog(cs("d14").as_ptr(), ptr::null_mut()),
            CfStatus::NullPointer
        );
        let mut s = CfSingularSummary::default();
        assert_eq!(cf_singular_locus(ptr::null(), &mut s), CfStatus::NullPointer);
        assert_eq!(cf_configuration_len(ptr::null()), 0);
        cf_configuration_free(ptr::null_mut());
        cf_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/cuspforge.h")).unwrap();
    for name in [
        "typedef struct CfConfiguration CfConfiguration",
        "CfSingularSummary",
        "CF_STATUS_NOT_PROPORTIONAL",
        "cf_configuration_from_json",
        "cf_configuration_catalog",
        "cf_configuration_free",
        "cf_configuration_to_json",
        "cf_string_free",
        "cf_singular_locus",
        "cf_pullback",
        "cf_series_json",
        "cf_last_error_message",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

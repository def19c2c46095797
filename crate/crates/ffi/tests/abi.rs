use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use sths_ffi::*;

fn design(paths: u32, alpha: f64) -> *mut SthsSchedule {
    let mut s = ptr::null_mut();
    let st = unsafe { sths_design(5, 0.5, 77e9, 1e9, paths, 20.0, alpha, &mut s) };
    assert_eq!(st, SthsStatus::Ok);
    assert!(!s.is_null());
    s
}

fn last_error() -> String {
    let p = sths_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn design_and_query() {
    let s = design(4, 1.0);
    let (mut re, mut im) = (0.0, 0.0);
    unsafe {
        assert_eq!(sths_array_factor(s, 1, 20.0, &mut re, &mut im), SthsStatus::Ok);
        assert!((re.hypot(im) - 30.0 / std::f64::consts::PI).abs() < 1e-9);
        let mut z = 0.0;
        assert_eq!(sths_harmonic_efficiency(s, &mut z), SthsStatus::Ok);
        assert!((z - 9.0 / std::f64::consts::PI.powi(2)).abs() < 1e-9);
        let (mut p1, mut pt) = (0.0, 0.0);
        assert_eq!(sths_harmonic_power(s, 1, &mut p1), SthsStatus::Ok);
        assert_eq!(sths_total_power(s, &mut pt), SthsStatus::Ok);
        assert!((p1 / pt - z).abs() < 1e-12);
        sths_schedule_free(s);
    }
}

#[test]
fn json_round_trip() {
    let s = design(8, 0.5);
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(sths_schedule_to_json(s, &mut text), SthsStatus::Ok);
        let json = CStr::from_ptr(text).to_owned();
        sths_string_free(text);

        let mut back = ptr::null_mut();
        assert_eq!(sths_schedule_from_json(json.as_ptr(), &mut back), SthsStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(sths_schedule_to_json(back, &mut again), SthsStatus::Ok);
        assert_eq!(CStr::from_ptr(again), json.as_c_str());
        sths_string_free(again);
        sths_schedule_free(back);
        sths_schedule_free(s);
    }
}

#[test]
fn error_codes() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(sths_design(5, 0.5, 77e9, 1e9, 3, 20.0, 1.0, &mut s), SthsStatus::InvalidArgument);
        assert!(last_error().contains("path count"));
        assert!(s.is_null());
        assert_eq!(sths_design(5, 0.5, 77e9, 1e9, 4, 20.0, 1.5, &mut s), SthsStatus::InvalidArgument);
        assert_eq!(sths_design(5, 0.5, 77e9, 1e9, 4, 20.0, 1.0, ptr::null_mut()), SthsStatus::NullPointer);
        let mut z = 0.0;
        assert_eq!(sths_harmonic_efficiency(ptr::null(), &mut z), SthsStatus::NullPointer);

        let bad = CString::new("{\"config\": 1}").unwrap();
        assert_eq!(sths_schedule_from_json(bad.as_ptr(), &mut s), SthsStatus::Parse);
        assert!(!last_error().is_empty());

        assert_eq!(sths_predistort_alpha(0.5, &mut z), SthsStatus::Ok);
        assert!(sths_last_error().is_null());
        assert_eq!(sths_predistort_alpha(2.0, &mut z), SthsStatus::InvalidArgument);
        sths_schedule_free(ptr::null_mut());
        sths_string_free(ptr::null_mut());
    }
}

#[test]
fn modulation_and_circuit() {
    let mut a = 0.0;
    unsafe {
        assert_eq!(sths_predistort_alpha(1.0 / 3.0, &mut a), SthsStatus::Ok);
    }
    assert!((sths_amplitude_of_alpha(a) - 1.0 / 3.0).abs() < 1e-12);
    let p = SthsCircuitParams {
        supply_voltage: 1.2,
        bias_current: 0.02,
        peak_voltage: 1.0,
        load_resistance: 25.0,
        switch_resistance: f64::INFINITY,
        switch_capacitance: 0.0,
        pulse_freq: 1e9,
    };
    let mut z = 0.0;
    unsafe {
        assert_eq!(sths_circuit_efficiency(&p, 0.4, &mut z), SthsStatus::Ok);
        assert!((z - 0.02 / 0.024).abs() < 1e-12);
        let bad = SthsCircuitParams { peak_voltage: 2.0, ..p };
        assert_eq!(sths_circuit_efficiency(&bad, 0.4, &mut z), SthsStatus::InvalidArgument);
        assert_eq!(sths_circuit_efficiency(ptr::null(), 0.4, &mut z), SthsStatus::NullPointer);
    }
}

#[test]
fn header_declares_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sths.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["sths_design", "sths_schedule_free", "sths_last_error", "sths_predistort_alpha", "STHS_STATUS_PANIC"] {
        assert!(text.contains(name), "{name}");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

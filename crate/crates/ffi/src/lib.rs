//! C ABI over the `sths` library.
//!
//! Every fallible call returns an [`SthsStatus`]; on failure the message is
//! available from [`sths_last_error`] on the same thread. Schedules are
//! opaque handles released with [`sths_schedule_free`], strings returned by
//! the library are released with [`sths_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sths::array_model::{ArrayConfig, ArraySchedule, PathCount};
use sths::circuit_model::{circuit_efficiency, CircuitParams};
use sths::harmonic_analysis::{array_factor, harmonic_efficiency, harmonic_power, total_power};
use sths::io::{read_schedule, ScheduleDocument};
use sths::modulation::{amplitude_of_alpha, predistort_alpha, AmplitudeModel};
use sths::schedule_design::design_schedule;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SthsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Computation = 3,
    Parse = 4,
    Panic = 5,
}

/// Opaque switching schedule.
pub struct SthsSchedule {
    inner: ArraySchedule,
}

/// Circuit parameters in SI units. An ideal open switch uses an infinite
/// `switch_resistance`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SthsCircuitParams {
    pub supply_voltage: f64,
    pub bias_current: f64,
    pub peak_voltage: f64,
    pub load_resistance: f64,
    pub switch_resistance: f64,
    pub switch_capacitance: f64,
    pub pulse_freq: f64,
}

impl From<SthsCircuitParams> for CircuitParams {
    fn from(p: SthsCircuitParams) -> Self {
        CircuitParams {
            supply_voltage: p.supply_voltage,
            bias_current: p.bias_current,
            peak_voltage: p.peak_voltage,
            load_resistance: p.load_resistance,
            switch_resistance: p.switch_resistance,
            switch_capacitance: p.switch_capacitance,
            pulse_freq: p.pulse_freq,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(SthsStatus, String);

impl From<sths::Error> for Fail {
    fn from(e: sths::Error) -> Self {
        let status = match e {
            sths::Error::Json(_) | sths::Error::Input(_) | sths::Error::Constellation(_) => SthsStatus::Parse,
            sths::Error::ZeroHarmonic
            | sths::Error::ZeroPower
            | sths::Error::ImaginaryResidue(_)
            | sths::Error::Unreachable(_) => SthsStatus::Computation,
            _ => SthsStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SthsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SthsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SthsStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(SthsStatus::NullPointer, format!("{name} is null"))
}

/// # Safety
/// `s` must be null or a live handle.
unsafe fn schedule<'a>(s: *const SthsSchedule) -> Result<&'a ArraySchedule, Fail> {
    s.as_ref().map(|h| &h.inner).ok_or_else(|| null("schedule"))
}

/// # Safety
/// `out` must be null or valid for a write.
unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn sths_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Designs a schedule. `paths` is 4 or 8, `steer_deg` is the steering angle
/// in degrees and `alpha` the duty cycle ratio in (0, 1].
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_design(
    n_elements: usize,
    spacing_wavelengths: f64,
    carrier_freq: f64,
    pulse_freq: f64,
    paths: u32,
    steer_deg: f64,
    alpha: f64,
    out: *mut *mut SthsSchedule,
) -> SthsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let paths = PathCount::from_count(paths as usize)
            .ok_or_else(|| Fail(SthsStatus::InvalidArgument, format!("path count {paths} must be 4 or 8")))?;
        let config =
            ArrayConfig::with_spacing_wavelengths(n_elements, spacing_wavelengths, carrier_freq, pulse_freq, paths);
        let inner = design_schedule(&config, steer_deg.to_radians(), alpha)?;
        write(out, Box::into_raw(Box::new(SthsSchedule { inner })))
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sths_schedule_free(s: *mut SthsSchedule) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Parses and validates a schedule JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_schedule_from_json(json: *const c_char, out: *mut *mut SthsSchedule) -> SthsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Fail(SthsStatus::Parse, e.to_string()))?;
        let inner = read_schedule(text)?;
        write(out, Box::into_raw(Box::new(SthsSchedule { inner })))
    })
}

/// Serializes a schedule; free the result with [`sths_string_free`].
///
/// # Safety
/// `s` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_schedule_to_json(s: *const SthsSchedule, out: *mut *mut c_char) -> SthsStatus {
    guard(|| {
        let text = ScheduleDocument::from_schedule(schedule(s)?).to_json()?;
        let c = CString::new(text).map_err(|e| Fail(SthsStatus::Computation, e.to_string()))?;
        write(out, c.into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sths_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Array factor of harmonic `m` at `theta_deg`.
///
/// # Safety
/// `s` must be a live handle; `re` and `im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sths_array_factor(
    s: *const SthsSchedule,
    m: i32,
    theta_deg: f64,
    re: *mut f64,
    im: *mut f64,
) -> SthsStatus {
    guard(|| {
        let s = schedule(s)?;
        if re.is_null() || im.is_null() {
            return Err(null("output pointer"));
        }
        let af = array_factor(s, m, theta_deg.to_radians());
        write(re, af.re)?;
        write(im, af.im)
    })
}

/// # Safety
/// `s` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_harmonic_power(s: *const SthsSchedule, m: i32, out: *mut f64) -> SthsStatus {
    guard(|| write(out, harmonic_power(schedule(s)?, m)?))
}

/// # Safety
/// `s` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_total_power(s: *const SthsSchedule, out: *mut f64) -> SthsStatus {
    guard(|| write(out, total_power(schedule(s)?)?))
}

/// # Safety
/// `s` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_harmonic_efficiency(s: *const SthsSchedule, out: *mut f64) -> SthsStatus {
    guard(|| write(out, harmonic_efficiency(schedule(s)?)?))
}

/// Circuit drain efficiency at `duty` in (0, 2/3].
///
/// # Safety
/// `params` must point to a valid struct and `out` be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_circuit_efficiency(
    params: *const SthsCircuitParams,
    duty: f64,
    out: *mut f64,
) -> SthsStatus {
    guard(|| {
        let p: CircuitParams = (*params.as_ref().ok_or_else(|| null("params"))?).into();
        p.validate()?;
        write(out, circuit_efficiency(&p, duty)?)
    })
}

/// First-harmonic amplitude relative to the peak mode.
#[no_mangle]
pub extern "C" fn sths_amplitude_of_alpha(alpha: f64) -> f64 {
    amplitude_of_alpha(alpha)
}

/// Duty cycle ratio whose ideal amplitude equals `target` in (0, 1].
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sths_predistort_alpha(target: f64, out: *mut f64) -> SthsStatus {
    guard(|| write(out, predistort_alpha(target, &AmplitudeModel::Ideal)?))
}

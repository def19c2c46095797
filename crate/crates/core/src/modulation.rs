//! QAM symbol planning by duty cycle ratio and carrier phase, with
//! predistortion of the first-harmonic amplitude law.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array_model::ArrayConfig;
use crate::circuit_model::{circuit_efficiency, duty_from_alpha, CircuitParams, MAX_DUTY};
use crate::error::{Error, Result};
use crate::harmonic_analysis::array_factor;
use crate::schedule_design::design_schedule;

const BISECTION_STEPS: usize = 200;

/// First-harmonic amplitude relative to the peak mode: `sin(alpha pi/3) / sin(pi/3)`.
pub fn amplitude_of_alpha(alpha: f64) -> f64 {
    (alpha * PI / 3.0).sin() / (PI / 3.0).sin()
}

/// Amplitude law to invert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeModel {
    Ideal,
    /// Ideal law scaled by `sqrt(zeta_circ(alpha) / zeta_circ(1))`.
    WithCircuit(CircuitParams),
}

impl AmplitudeModel {
    pub fn amplitude(&self, alpha: f64) -> Result<f64> {
        let a = amplitude_of_alpha(alpha);
        match self {
            AmplitudeModel::Ideal => Ok(a),
            AmplitudeModel::WithCircuit(p) => {
                let droop = circuit_efficiency(p, duty_from_alpha(alpha))? / circuit_efficiency(p, MAX_DUTY)?;
                Ok(a * droop.sqrt())
            }
        }
    }
}

/// Duty cycle ratio whose amplitude equals `target`, by bisection on `(0, 1]`.
pub fn predistort_alpha(target: f64, model: &AmplitudeModel) -> Result<f64> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::TargetAmplitude(target));
    }
    if target == 1.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let f_hi = model.amplitude(hi)?;
    if !(f_hi >= target) {
        return Err(Error::Unreachable(target));
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = model.amplitude(mid)?;
        if !f.is_finite() {
            return Err(Error::Unreachable(target));
        }
        if f < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi <= 0.0 {
        return Err(Error::Unreachable(target));
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predistortion {
    /// `10 log10(alpha) = 20 log10(target)`.
    Off,
    Ideal,
    Circuit(CircuitParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolPlan {
    pub symbol: Complex64,
    pub duty_ratio: f64,
    pub carrier_phase: f64,
    pub magnitude_target: f64,
}

pub fn plan_constellation(points: &[Complex64], predistortion: &Predistortion) -> Result<Vec<SymbolPlan>> {
    if points.is_empty() {
        return Err(Error::Constellation("no symbols".into()));
    }
    if let Some(p) = points.iter().find(|p| !(p.norm() > 0.0) || !p.norm().is_finite()) {
        return Err(Error::Constellation(format!("symbol {p} has no usable magnitude")));
    }
    let peak = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    points
        .iter()
        .map(|&symbol| {
            let target = (symbol.norm() / peak).min(1.0);
            let duty_ratio = match predistortion {
                Predistortion::Off => target * target,
                Predistortion::Ideal => predistort_alpha(target, &AmplitudeModel::Ideal)?,
                Predistortion::Circuit(p) => predistort_alpha(target, &AmplitudeModel::WithCircuit(*p))?,
            };
            Ok(SymbolPlan { symbol, duty_ratio, carrier_phase: symbol.arg(), magnitude_target: target })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstellationResult {
    pub received: Vec<Complex64>,
    pub ideal: Vec<Complex64>,
    pub evm_rms_percent: f64,
}

/// First-harmonic response toward the steering angle, with phase referenced
/// to the pulse centre so that pulse width alone does not rotate the symbol.
fn centred_response(config: &ArrayConfig, steer_angle: f64, alpha: f64) -> Result<Complex64> {
    let s = design_schedule(config, steer_angle, alpha)?;
    Ok(array_factor(&s, 1, steer_angle) * Complex64::from_polar(1.0, PI * alpha / 3.0))
}

/// Drives the ideal array with each plan and measures the received
/// constellation at the steering angle. With `circuit` the amplitude is
/// further scaled by the circuit efficiency droop.
pub fn simulate_constellation(
    plans: &[SymbolPlan],
    config: &ArrayConfig,
    steer_angle: f64,
    circuit: Option<&CircuitParams>,
) -> Result<ConstellationResult> {
    if plans.is_empty() {
        return Err(Error::Constellation("no symbols".into()));
    }
    let peak = centred_response(config, steer_angle, 1.0)?;
    let droop = |alpha: f64| -> Result<f64> {
        match circuit {
            None => Ok(1.0),
            Some(p) => Ok((circuit_efficiency(p, duty_from_alpha(alpha))? / circuit_efficiency(p, MAX_DUTY)?).sqrt()),
        }
    };
    let peak_symbol = plans.iter().map(|p| p.symbol.norm()).fold(0.0, f64::max);
    let mut received = Vec::with_capacity(plans.len());
    for p in plans {
        let rel = centred_response(config, steer_angle, p.duty_ratio)? / peak;
        received.push(rel * droop(p.duty_ratio)? * Complex64::from_polar(1.0, p.carrier_phase));
    }
    let ideal: Vec<Complex64> = plans.iter().map(|p| p.symbol / peak_symbol).collect();
    Ok(ConstellationResult { evm_rms_percent: evm_rms_percent(&received, &ideal), received, ideal })
}

/// `100 * RMS(received - ideal) / RMS(ideal)`.
pub fn evm_rms_percent(received: &[Complex64], ideal: &[Complex64]) -> f64 {
    let err: f64 = received.iter().zip(ideal).map(|(r, i)| (r - i).norm_sqr()).sum();
    let reference: f64 = ideal.iter().map(|i| i.norm_sqr()).sum();
    100.0 * (err / reference).sqrt()
}

/// Square QAM with `order` points (4, 16, 64, ...) on odd integer coordinates.
pub fn square_qam(order: usize) -> Result<Vec<Complex64>> {
    let side = (order as f64).sqrt().round() as usize;
    if side < 2 || side * side != order {
        return Err(Error::Constellation(format!("{order} is not a square constellation size")));
    }
    let level = |k: usize| (2 * k) as f64 - (side - 1) as f64;
    Ok((0..side).flat_map(|q| (0..side).map(move |i| Complex64::new(level(i), level(side - 1 - q)))).collect())
}

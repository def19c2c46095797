//! Behavioral drain-efficiency model of the switched PA cell.
//!
//! Per path and period the cell spends a fraction `duty = 2 tau / T_p` in the
//! ON state (two pulses), leaks through `R_sw` for the rest, and pays one
//! charge/discharge of `C_sw` per pulse cycle.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::array_model::{ArrayConfig, PEAK_WIDTH};
use crate::error::{Error, Result};
use crate::harmonic_analysis::{harmonic_efficiency, harmonic_power};
use crate::schedule_design::design_schedule;

/// Largest duty: two pulses of `T_p/3`.
pub const MAX_DUTY: f64 = 2.0 * PEAK_WIDTH;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// `V_DD` in volts.
    pub supply_voltage: f64,
    /// `I_DD` in amperes.
    pub bias_current: f64,
    /// `v_pk` in volts.
    pub peak_voltage: f64,
    /// `R_L` in ohms.
    pub load_resistance: f64,
    /// `R_sw` in ohms; `null` in JSON for an ideal open switch.
    #[serde(serialize_with = "ser_resistance", deserialize_with = "de_resistance")]
    pub switch_resistance: f64,
    /// `C_sw` in farads.
    pub switch_capacitance: f64,
    /// `f_p` in Hz.
    pub pulse_freq: f64,
}

fn ser_resistance<S: Serializer>(r: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_infinite() {
        s.serialize_none()
    } else {
        s.serialize_some(r)
    }
}

fn de_resistance<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("supply_voltage", self.supply_voltage),
            ("bias_current", self.bias_current),
            ("peak_voltage", self.peak_voltage),
            ("load_resistance", self.load_resistance),
            ("pulse_freq", self.pulse_freq),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::CircuitParam(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.switch_resistance > 0.0) {
            return Err(Error::CircuitParam(format!(
                "switch_resistance = {} must be positive",
                self.switch_resistance
            )));
        }
        if !(self.switch_capacitance >= 0.0 && self.switch_capacitance.is_finite()) {
            return Err(Error::CircuitParam(format!(
                "switch_capacitance = {} must be nonnegative",
                self.switch_capacitance
            )));
        }
        if self.peak_voltage > self.supply_voltage {
            return Err(Error::CircuitParam(format!(
                "peak_voltage {} exceeds supply_voltage {}",
                self.peak_voltage, self.supply_voltage
            )));
        }
        Ok(())
    }

    pub fn with_pulse_freq(mut self, pulse_freq: f64) -> Self {
        self.pulse_freq = pulse_freq;
        self
    }

    /// ON-state output power `v_pk^2 / (2 R_L)`.
    pub fn output_power(&self) -> f64 {
        self.peak_voltage * self.peak_voltage / (2.0 * self.load_resistance)
    }

    /// ON-state DC power `V_DD I_DD`.
    pub fn dc_power(&self) -> f64 {
        self.supply_voltage * self.bias_current
    }

    /// OFF-state leakage `V_DD^2 / R_sw`.
    pub fn leakage_power(&self) -> f64 {
        self.supply_voltage * self.supply_voltage / self.switch_resistance
    }

    /// Switching loss `f_p V_DD^2 C_sw`.
    pub fn dynamic_power(&self) -> f64 {
        self.pulse_freq * self.supply_voltage * self.supply_voltage * self.switch_capacitance
    }

    pub fn is_loss_free(&self) -> bool {
        self.leakage_power() == 0.0 && self.dynamic_power() == 0.0
    }
}

/// Switch parasitics per unit transistor width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    /// `C_sw / W` in F/m.
    pub cap_per_width: f64,
    /// `R_sw * W` in ohm m.
    pub res_times_width: f64,
    /// `W` in meters.
    pub width: f64,
}

impl DensityParams {
    /// 65-nm CMOS densities: 0.35 nF/m and 5.4 ohm m.
    pub fn cmos65(width: f64) -> Self {
        DensityParams { cap_per_width: 0.35e-9, res_times_width: 5.4, width }
    }
}

pub fn params_from_width(
    density: &DensityParams,
    supply_voltage: f64,
    bias_current: f64,
    peak_voltage: f64,
    load_resistance: f64,
    pulse_freq: f64,
) -> Result<CircuitParams> {
    for (name, v) in [
        ("cap_per_width", density.cap_per_width),
        ("res_times_width", density.res_times_width),
        ("width", density.width),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::CircuitParam(format!("{name} = {v} must be positive")));
        }
    }
    let p = CircuitParams {
        supply_voltage,
        bias_current,
        peak_voltage,
        load_resistance,
        switch_resistance: density.res_times_width / density.width,
        switch_capacitance: density.cap_per_width * density.width,
        pulse_freq,
    };
    p.validate()?;
    Ok(p)
}

/// Period-averaged powers in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBreakdown {
    pub on_output: f64,
    pub on_dc: f64,
    pub leakage: f64,
    pub dynamic: f64,
}

impl PowerBreakdown {
    pub fn total_dc(&self) -> f64 {
        self.on_dc + self.leakage + self.dynamic
    }

    pub fn efficiency(&self) -> f64 {
        self.on_output / self.total_dc()
    }
}

fn check_duty(duty: f64) -> Result<()> {
    if duty > 0.0 && duty <= MAX_DUTY + 1e-15 {
        Ok(())
    } else {
        Err(Error::Duty(duty))
    }
}

pub fn power_breakdown(params: &CircuitParams, duty: f64) -> Result<PowerBreakdown> {
    check_duty(duty)?;
    params.validate()?;
    Ok(PowerBreakdown {
        on_output: duty * params.output_power(),
        on_dc: duty * params.dc_power(),
        leakage: (1.0 - duty) * params.leakage_power(),
        dynamic: params.dynamic_power(),
    })
}

/// `zeta_circ = d P_out / (d P_DC + (1 - d) P_leak + P_dyn)`.
pub fn circuit_efficiency(params: &CircuitParams, duty: f64) -> Result<f64> {
    check_duty(duty)?;
    params.validate()?;
    let num = duty * params.output_power();
    let den = duty * params.dc_power() + (1.0 - duty) * params.leakage_power() + params.dynamic_power();
    Ok(num / den)
}

/// `eta = zeta_harm * zeta_circ`.
pub fn total_drain_efficiency(harmonic_eff: f64, circuit_eff: f64) -> f64 {
    harmonic_eff * circuit_eff
}

/// Duty `2 tau / T_p` for a duty cycle ratio.
pub fn duty_from_alpha(alpha: f64) -> f64 {
    alpha * MAX_DUTY
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PboRow {
    pub alpha: f64,
    pub ten_log_alpha: f64,
    pub zeta_harm: f64,
    pub zeta_circ: Option<f64>,
    pub eta: Option<f64>,
    pub pbo_db: f64,
}

/// Efficiency and first-harmonic back-off over a grid of duty cycle ratios.
pub fn pbo_sweep(
    config: &ArrayConfig,
    params: Option<&CircuitParams>,
    steer_angle: f64,
    alpha_grid: &[f64],
) -> Result<Vec<PboRow>> {
    let peak = harmonic_power(&design_schedule(config, steer_angle, 1.0)?, 1)?;
    if !(peak > 0.0) {
        return Err(Error::ZeroPower);
    }
    alpha_grid
        .iter()
        .map(|&alpha| {
            let s = design_schedule(config, steer_angle, alpha)?;
            let zeta_harm = harmonic_efficiency(&s)?;
            let zeta_circ = params.map(|p| circuit_efficiency(p, duty_from_alpha(alpha))).transpose()?;
            Ok(PboRow {
                alpha,
                ten_log_alpha: 10.0 * alpha.log10(),
                zeta_harm,
                zeta_circ,
                eta: zeta_circ.map(|z| total_drain_efficiency(zeta_harm, z)),
                pbo_db: 10.0 * (harmonic_power(&s, 1)? / peak).log10(),
            })
        })
        .collect()
}

/// One measured circuit efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencySample {
    pub duty: f64,
    pub pulse_freq: f64,
    pub efficiency: f64,
}

/// Circuit losses relative to the ON-state DC power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRatios {
    /// `P_out / P_DC`.
    pub on_efficiency: f64,
    /// `P_leak / P_DC`.
    pub leakage_ratio: f64,
    /// `P_dyn / (P_DC f_p)` in seconds.
    pub dynamic_ratio_per_hz: f64,
}

impl LossRatios {
    pub fn efficiency(&self, duty: f64, pulse_freq: f64) -> f64 {
        duty * self.on_efficiency / (duty + (1.0 - duty) * self.leakage_ratio + self.dynamic_ratio_per_hz * pulse_freq)
    }

    /// Circuit parameters realizing these ratios for a chosen bias point and load.
    pub fn to_params(
        &self,
        supply_voltage: f64,
        bias_current: f64,
        load_resistance: f64,
        pulse_freq: f64,
    ) -> Result<CircuitParams> {
        let dc = supply_voltage * bias_current;
        let v2 = supply_voltage * supply_voltage;
        let p = CircuitParams {
            supply_voltage,
            bias_current,
            peak_voltage: (2.0 * load_resistance * self.on_efficiency * dc).sqrt(),
            load_resistance,
            switch_resistance: v2 / (self.leakage_ratio * dc),
            switch_capacitance: self.dynamic_ratio_per_hz * dc / v2,
            pulse_freq,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<&CircuitParams> for LossRatios {
    fn from(p: &CircuitParams) -> Self {
        let dc = p.dc_power();
        LossRatios {
            on_efficiency: p.output_power() / dc,
            leakage_ratio: p.leakage_power() / dc,
            dynamic_ratio_per_hz: p.dynamic_power() / (dc * p.pulse_freq),
        }
    }
}

fn least_squares(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<DVector<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.len() < cols || cols == 0 {
        return Err(Error::Input(format!("{} samples cannot determine {cols} parameters", rows.len())));
    }
    let a = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let x = a.svd(true, true).solve(&b, 1e-14).map_err(|e| Error::Input(e.to_string()))?;
    Ok(x)
}

fn check_samples(samples: &[EfficiencySample]) -> Result<()> {
    for s in samples {
        check_duty(s.duty)?;
        if !(s.efficiency > 0.0 && s.efficiency < 1.0 && s.pulse_freq > 0.0) {
            return Err(Error::Input(format!("bad efficiency sample {s:?}")));
        }
    }
    Ok(())
}

/// Fits all three loss ratios to measured efficiencies.
///
/// `d / zeta = 1/eta0 * (d + (1 - d) L + D f_p)` is linear in
/// `(1/eta0, L/eta0, D/eta0)`, so the fit is an ordinary least-squares solve
/// on reciprocal efficiencies.
pub fn fit_loss_ratios(samples: &[EfficiencySample]) -> Result<LossRatios> {
    check_samples(samples)?;
    let rows = samples.iter().map(|s| vec![1.0, (1.0 - s.duty) / s.duty, s.pulse_freq / s.duty]).collect();
    let rhs = samples.iter().map(|s| 1.0 / s.efficiency).collect();
    let x = least_squares(rows, rhs)?;
    let fit = LossRatios { on_efficiency: 1.0 / x[0], leakage_ratio: x[1] / x[0], dynamic_ratio_per_hz: x[2] / x[0] };
    if !(fit.on_efficiency > 0.0 && fit.leakage_ratio >= 0.0 && fit.dynamic_ratio_per_hz >= 0.0) {
        return Err(Error::Input(format!("fit gave nonphysical ratios {fit:?}")));
    }
    Ok(fit)
}

/// Fits `P_out / P_DC` and the transistor width with the switch parasitics
/// tied to width through fixed densities.
pub fn fit_width(
    samples: &[EfficiencySample],
    cap_per_width: f64,
    res_times_width: f64,
    supply_voltage: f64,
    bias_current: f64,
) -> Result<(f64, f64)> {
    check_samples(samples)?;
    let dc = supply_voltage * bias_current;
    let v2 = supply_voltage * supply_voltage;
    let rows = samples
        .iter()
        .map(|s| {
            let per_width = (1.0 - s.duty) * v2 / res_times_width + s.pulse_freq * v2 * cap_per_width;
            vec![1.0, per_width / (dc * s.duty)]
        })
        .collect();
    let rhs = samples.iter().map(|s| 1.0 / s.efficiency).collect();
    let x = least_squares(rows, rhs)?;
    let (on_efficiency, width) = (1.0 / x[0], x[1] / x[0]);
    if !(on_efficiency > 0.0 && width > 0.0) {
        return Err(Error::Input(format!("fit gave nonphysical width {width}")));
    }
    Ok((on_efficiency, width))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lossy() -> CircuitParams {
        CircuitParams {
            supply_voltage: 1.2,
            bias_current: 0.02,
            peak_voltage: 1.0,
            load_resistance: 25.0,
            switch_resistance: 5000.0,
            switch_capacitance: 35e-15,
            pulse_freq: 1e9,
        }
    }

    #[test]
    fn json_round_trip_with_ideal_switch() {
        let p = CircuitParams { switch_resistance: f64::INFINITY, ..lossy() };
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"switch_resistance\":null"));
        let q: CircuitParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn validation() {
        assert!(lossy().validate().is_ok());
        assert!(CircuitParams { peak_voltage: 1.3, ..lossy() }.validate().is_err());
        assert!(CircuitParams { load_resistance: 0.0, ..lossy() }.validate().is_err());
        assert!(CircuitParams { switch_capacitance: -1e-15, ..lossy() }.validate().is_err());
        assert!(matches!(circuit_efficiency(&lossy(), 0.7), Err(Error::Duty(_))));
        assert!(matches!(power_breakdown(&lossy(), 0.0), Err(Error::Duty(_))));
    }

    #[test]
    fn ratios_round_trip_through_params() {
        let r = LossRatios::from(&lossy());
        let back = r.to_params(1.2, 0.02, 25.0, 1e9).unwrap();
        for d in [0.1, 0.4, MAX_DUTY] {
            let a = circuit_efficiency(&lossy(), d).unwrap();
            assert!((a - r.efficiency(d, 1e9)).abs() < 1e-14);
            assert!((a - circuit_efficiency(&back, d).unwrap()).abs() < 1e-14);
        }
    }
}

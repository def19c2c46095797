//! Fourier coefficients, array factors and harmonic powers of switched arrays.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::array_model::{ArraySchedule, ElementSchedule, PulseTrain};
use crate::error::{Error, Result};
use crate::schedule_design::design_schedule;

/// Default harmonic truncation for spectra.
pub const DEFAULT_M_MAX: i32 = 101;

/// Powers below this fraction of the total are reported as zero.
pub const POWER_CLAMP: f64 = 1e-15;

/// Pattern values are floored here instead of reaching `-inf`.
pub const DB_FLOOR: f64 = -300.0;

const IMAG_TOL: f64 = 1e-9;

/// Unnormalized `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Coefficient of a unit pulse on `[onset, onset + width)` at harmonic `m`.
fn pulse_coefficient(onset: f64, width: f64, m: i32) -> Complex64 {
    if m == 0 {
        return Complex64::new(width, 0.0);
    }
    let mf = m as f64;
    let mag = (PI * mf * width).sin() / (PI * mf);
    Complex64::from_polar(mag, -PI * mf * (2.0 * onset + width))
}

/// Exact Fourier coefficient of one path: its pulse train times `e^{j phase}`.
pub fn path_coefficient(train: &PulseTrain, path_phase: f64, m: i32) -> Complex64 {
    let a = pulse_coefficient(train.onset_pos, train.width, m) - pulse_coefficient(train.onset_neg, train.width, m);
    a * Complex64::from_polar(1.0, path_phase)
}

/// `A_mn`: sum of the path coefficients of one element.
pub fn combined_coefficient(element: &ElementSchedule, m: i32) -> Complex64 {
    element.paths.iter().map(|p| path_coefficient(&p.train, p.phase, m)).sum()
}

/// Coefficients of one harmonic across all elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicCoefficient {
    pub harmonic_index: i32,
    pub per_element: Vec<Complex64>,
}

impl HarmonicCoefficient {
    pub fn of(schedule: &ArraySchedule, m: i32) -> Self {
        HarmonicCoefficient {
            harmonic_index: m,
            per_element: schedule.elements.iter().map(|e| combined_coefficient(e, m)).collect(),
        }
    }

    /// `sum_n I_n A_mn e^{j beta n d sin(theta)}`.
    pub fn array_factor(&self, schedule: &ArraySchedule, theta: f64) -> Complex64 {
        let psi = schedule.config.electrical_spacing() * theta.sin();
        self.per_element
            .iter()
            .zip(&schedule.config.excitations)
            .enumerate()
            .map(|(n, (a, i))| a * *i * Complex64::from_polar(1.0, psi * n as f64))
            .sum()
    }
}

/// Array factor of harmonic `m` at angle `theta` from broadside (time factor dropped).
pub fn array_factor(schedule: &ArraySchedule, m: i32, theta: f64) -> Complex64 {
    HarmonicCoefficient::of(schedule, m).array_factor(schedule, theta)
}

/// Hermitian form `sum_n sum_s I_n I_s sinc(beta d (n - s)) x_ns`.
fn radiated<F>(schedule: &ArraySchedule, mut pair: F) -> Result<f64>
where
    F: FnMut(usize, usize) -> Complex64,
{
    let bd = schedule.config.electrical_spacing();
    let exc = &schedule.config.excitations;
    let n = schedule.elements.len();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for i in 0..n {
        for k in 0..n {
            let term = pair(i, k) * (exc[i] * exc[k] * sinc(bd * (i as f64 - k as f64)));
            scale += term.norm();
            sum += term;
        }
    }
    if sum.im.abs() > IMAG_TOL * scale.max(1.0) {
        return Err(Error::ImaginaryResidue(sum.im));
    }
    Ok(sum.re.max(0.0))
}

/// Radiated power `P_(m)` of harmonic `m`.
pub fn harmonic_power(schedule: &ArraySchedule, m: i32) -> Result<f64> {
    let c = HarmonicCoefficient::of(schedule, m);
    coefficient_power(schedule, &c)
}

fn coefficient_power(schedule: &ArraySchedule, c: &HarmonicCoefficient) -> Result<f64> {
    let a = &c.per_element;
    radiated(schedule, |i, k| a[i] * a[k].conj())
}

/// Period average of `E_a(t) E_b*(t)`, integrated exactly between pulse edges.
fn envelope_overlap(a: &ElementSchedule, b: &ElementSchedule) -> Complex64 {
    let mut cuts = a.edges();
    cuts.extend(b.edges());
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            a.envelope_at(mid) * b.envelope_at(mid).conj() * (w[1] - w[0])
        })
        .sum()
}

/// Total radiated power over all harmonics, from the time-domain envelopes.
pub fn total_power(schedule: &ArraySchedule) -> Result<f64> {
    let el = &schedule.elements;
    radiated(schedule, |i, k| envelope_overlap(&el[i], &el[k]))
}

/// `zeta_harm = P_(1) / P_tot`.
pub fn harmonic_efficiency(schedule: &ArraySchedule) -> Result<f64> {
    let total = total_power(schedule)?;
    if !(total > 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(harmonic_power(schedule, 1)? / total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSpectrum {
    pub m_max: i32,
    pub coefficients: BTreeMap<i32, HarmonicCoefficient>,
    pub powers: BTreeMap<i32, f64>,
    pub total_power: f64,
    pub efficiency: f64,
}

impl HarmonicSpectrum {
    pub fn compute(schedule: &ArraySchedule, m_max: i32) -> Result<Self> {
        if m_max < 1 {
            return Err(Error::Input(format!("m_max {m_max} must be at least 1")));
        }
        let total_power = total_power(schedule)?;
        if !(total_power > 0.0) {
            return Err(Error::ZeroPower);
        }
        let mut coefficients = BTreeMap::new();
        let mut powers = BTreeMap::new();
        for m in -m_max..=m_max {
            let c = HarmonicCoefficient::of(schedule, m);
            let p = coefficient_power(schedule, &c)?;
            powers.insert(m, if p < POWER_CLAMP * total_power { 0.0 } else { p });
            coefficients.insert(m, c);
        }
        let efficiency = powers[&1] / total_power;
        Ok(HarmonicSpectrum { m_max, coefficients, powers, total_power, efficiency })
    }

    /// Sum of the retained harmonic powers.
    pub fn truncated_power(&self) -> f64 {
        self.powers.values().sum()
    }
}

/// Normalization of a radiation pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatternReference {
    /// Peak of `|AF_1|` of the schedule itself over the grid.
    SelfPeak,
    /// Peak of `|AF_1|` over the grid for the same array and steering at `alpha = 1`.
    PeakMode,
    /// Fixed linear magnitude.
    Magnitude(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiationPattern {
    pub theta: Vec<f64>,
    pub harmonics: Vec<i32>,
    /// Row per angle, column per harmonic, in dB.
    pub db: Vec<Vec<f64>>,
    pub reference: f64,
}

fn peak_magnitude(schedule: &ArraySchedule, m: i32, grid: &[f64]) -> f64 {
    let c = HarmonicCoefficient::of(schedule, m);
    grid.iter().map(|&t| c.array_factor(schedule, t).norm()).fold(0.0, f64::max)
}

fn to_db(ratio: f64) -> f64 {
    (20.0 * ratio.log10()).max(DB_FLOOR)
}

/// Normalized relative power pattern `20 log10(|AF_m| / ref)` on a grid of angles.
pub fn radiation_pattern(
    schedule: &ArraySchedule,
    harmonics: &[i32],
    theta_grid: &[f64],
    reference: PatternReference,
) -> Result<RadiationPattern> {
    if theta_grid.is_empty() {
        return Err(Error::Input("empty angle grid".into()));
    }
    let reference = match reference {
        PatternReference::SelfPeak => peak_magnitude(schedule, 1, theta_grid),
        PatternReference::PeakMode => {
            let peak = design_schedule(&schedule.config, schedule.steer_angle, 1.0)?;
            peak_magnitude(&peak, 1, theta_grid)
        }
        PatternReference::Magnitude(r) => r,
    };
    if !(reference > 0.0) {
        return Err(Error::ZeroPower);
    }
    let coeffs: Vec<_> = harmonics.iter().map(|&m| HarmonicCoefficient::of(schedule, m)).collect();
    let db = theta_grid
        .iter()
        .map(|&t| coeffs.iter().map(|c| to_db(c.array_factor(schedule, t).norm() / reference)).collect())
        .collect();
    Ok(RadiationPattern { theta: theta_grid.to_vec(), harmonics: harmonics.to_vec(), db, reference })
}

/// Uniform grid from `start` to `stop` inclusive, in the units given.
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Input(format!("empty grid {start}..{stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// Sideband level on the default grid of 0.1 degree over `[-90, 90]` degrees.
pub fn sideband_level(schedule: &ArraySchedule, m_max: i32) -> Result<f64> {
    let grid: Vec<f64> = (0..=1800).map(|k| (-90.0 + 0.1 * k as f64).to_radians()).collect();
    sideband_level_on_grid(schedule, m_max, &grid)
}

/// Strongest pattern peak of any harmonic `m != 1`, `|m| <= m_max`, relative
/// to the peak of harmonic 1, in dB.
pub fn sideband_level_on_grid(schedule: &ArraySchedule, m_max: i32, grid: &[f64]) -> Result<f64> {
    if m_max < 2 {
        return Err(Error::Input(format!("m_max {m_max} must be at least 2")));
    }
    if grid.is_empty() {
        return Err(Error::Input("empty angle grid".into()));
    }
    let main = peak_magnitude(schedule, 1, grid);
    if !(main > 0.0) {
        return Err(Error::ZeroPower);
    }
    let worst = (-m_max..=m_max).filter(|&m| m != 1).map(|m| peak_magnitude(schedule, m, grid)).fold(0.0, f64::max);
    Ok(to_db(worst / main))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::{ArrayConfig, PathCount, PathDrive};

    fn config(paths: PathCount) -> ArrayConfig {
        ArrayConfig::with_spacing_wavelengths(5, 0.5, 77e9, 1e9, paths)
    }

    #[test]
    fn single_path_first_harmonic() {
        let t = PulseTrain::new(0.0, 0.5, 1.0 / 3.0);
        let a = path_coefficient(&t, 0.0, 1);
        assert!((a.norm() - 2.0 / PI * (PI / 3.0).sin()).abs() < 1e-15);
        assert!((a.norm() - 0.5513).abs() < 1e-4);
        assert_eq!(path_coefficient(&t, 0.3, 0).norm(), 0.0);
        assert!(path_coefficient(&t, 0.3, 4).norm() < 1e-16);
    }

    #[test]
    fn total_power_single_path() {
        let mut cfg = config(PathCount::Four);
        cfg.n_elements = 1;
        cfg.excitations = vec![1.0];
        for w in [0.05, 0.2, 1.0 / 3.0] {
            let el = ElementSchedule {
                index: 0,
                paths: vec![PathDrive { phase: 0.7, train: PulseTrain::new(0.9, 0.4, w) }],
            };
            let s = ArraySchedule { config: cfg.clone(), duty_ratio: 1.0, steer_angle: 0.0, elements: vec![el] };
            assert!((total_power(&s).unwrap() - 2.0 * w).abs() < 1e-14);
        }
    }

    #[test]
    fn efficiency_rejects_silent_schedule() {
        let mut s = design_schedule(&config(PathCount::Four), 0.0, 1.0).unwrap();
        for el in &mut s.elements {
            el.paths.clear();
        }
        assert!(matches!(harmonic_efficiency(&s), Err(Error::ZeroPower)));
    }

    #[test]
    fn grid_bounds() {
        let g = uniform_grid(-90.0, 90.0, 0.25).unwrap();
        assert_eq!(g.len(), 721);
        assert_eq!(*g.last().unwrap(), 90.0);
        assert!(uniform_grid(1.0, 0.0, 0.1).is_err());
        assert!(uniform_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sideband_needs_two_harmonics() {
        let s = design_schedule(&config(PathCount::Four), 0.0, 1.0).unwrap();
        assert!(sideband_level(&s, 1).is_err());
    }
}

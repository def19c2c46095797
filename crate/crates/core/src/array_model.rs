//! Array geometry, switching schedules and time-domain envelope synthesis.
//!
//! All pulse times are stored normalized by the pulse period `T_p`, so a
//! schedule is a set of dimensionless onsets in `[0, 1)` plus a common pulse
//! width. Seconds are only produced at the interface (see
//! [`PulseTrain::onset_pos_seconds`]).
//!
//! The envelope synthesized here is the numerical oracle for the analytic
//! coefficients in [`crate::harmonic_analysis`]: it never touches a Fourier
//! formula, only pulse edges.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Smallest accepted carrier-to-pulse frequency ratio.
pub const MIN_CARRIER_TO_PULSE_RATIO: f64 = 10.0;

/// Peak-mode pulse width as a fraction of the period.
pub const PEAK_WIDTH: f64 = 1.0 / 3.0;

/// Smallest accepted samples-per-period for envelope synthesis.
pub const MIN_SAMPLES: usize = 64;

/// Wraps a normalized time into `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Wraps a phase into `(-pi, pi]`.
pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let r = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathCount {
    Four,
    Eight,
}

impl PathCount {
    pub fn count(self) -> usize {
        match self {
            PathCount::Four => 4,
            PathCount::Eight => 8,
        }
    }

    pub fn from_count(n: usize) -> Option<Self> {
        match n {
            4 => Some(PathCount::Four),
            8 => Some(PathCount::Eight),
            _ => None,
        }
    }
}

/// Uniform linear array of isotropic elements driven by switched paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_elements: usize,
    /// Inter-element distance in meters.
    pub element_spacing: f64,
    /// Carrier frequency `f0` in Hz.
    pub carrier_freq: f64,
    /// Pulse (switching) frequency `f_p` in Hz.
    pub pulse_freq: f64,
    pub if_freq: Option<f64>,
    /// Amplitude excitations `I_n`, one per element.
    pub excitations: Vec<f64>,
    pub path_count: PathCount,
}

impl ArrayConfig {
    /// Uniformly excited array with spacing given in meters.
    pub fn new(
        n_elements: usize,
        element_spacing: f64,
        carrier_freq: f64,
        pulse_freq: f64,
        path_count: PathCount,
    ) -> Self {
        ArrayConfig {
            n_elements,
            element_spacing,
            carrier_freq,
            pulse_freq,
            if_freq: None,
            excitations: vec![1.0; n_elements],
            path_count,
        }
    }

    /// Uniformly excited array with spacing given in carrier wavelengths.
    pub fn with_spacing_wavelengths(
        n_elements: usize,
        spacing_wavelengths: f64,
        carrier_freq: f64,
        pulse_freq: f64,
        path_count: PathCount,
    ) -> Self {
        let spacing = spacing_wavelengths * SPEED_OF_LIGHT / carrier_freq;
        Self::new(n_elements, spacing, carrier_freq, pulse_freq, path_count)
    }

    pub fn with_excitations(mut self, excitations: Vec<f64>) -> Self {
        self.excitations = excitations;
        self
    }

    pub fn with_if_freq(mut self, if_freq: f64) -> Self {
        self.if_freq = Some(if_freq);
        self
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    /// Free-space wavenumber at the carrier, used for every harmonic.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    pub fn spacing_wavelengths(&self) -> f64 {
        self.element_spacing / self.wavelength()
    }

    /// Electrical spacing `beta * d` in radians.
    pub fn electrical_spacing(&self) -> f64 {
        self.wavenumber() * self.element_spacing
    }

    pub fn period(&self) -> f64 {
        1.0 / self.pulse_freq
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |rule| out.push(Violation { element: None, path: None, rule });
        if self.n_elements == 0 {
            push(Rule::NoElements);
        }
        if !(self.element_spacing > 0.0 && self.element_spacing.is_finite()) {
            push(Rule::SpacingNotPositive);
        }
        if !(self.carrier_freq > 0.0 && self.pulse_freq > 0.0)
            || !self.carrier_freq.is_finite()
            || !self.pulse_freq.is_finite()
        {
            push(Rule::FrequencyNotPositive);
        } else if self.carrier_freq / self.pulse_freq < MIN_CARRIER_TO_PULSE_RATIO {
            push(Rule::CarrierNotDominant);
        }
        if let Some(f_if) = self.if_freq {
            if !(self.pulse_freq > 2.0 * f_if) {
                push(Rule::IntermediateFrequencyAliasing);
            }
        }
        if self.excitations.len() != self.n_elements {
            push(Rule::ExcitationCount);
        } else if self.excitations.iter().any(|&i| !(i > 0.0 && i.is_finite())) {
            push(Rule::ExcitationNotPositive);
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.violations().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidConfig(v.to_string())),
        }
    }
}

/// Two equal-width rectangular pulses of opposite polarity per period.
///
/// Times are normalized by `T_p`. The train is `+1` on
/// `[onset_pos, onset_pos + width)` and `-1` on `[onset_neg, onset_neg + width)`,
/// both taken modulo one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTrain {
    pub onset_pos: f64,
    pub onset_neg: f64,
    pub width: f64,
}

impl PulseTrain {
    pub fn new(onset_pos: f64, onset_neg: f64, width: f64) -> Self {
        PulseTrain { onset_pos: wrap_unit(onset_pos), onset_neg: wrap_unit(onset_neg), width }
    }

    pub fn onset_pos_seconds(&self, pulse_freq: f64) -> f64 {
        self.onset_pos / pulse_freq
    }

    pub fn onset_neg_seconds(&self, pulse_freq: f64) -> f64 {
        self.onset_neg / pulse_freq
    }

    pub fn width_seconds(&self, pulse_freq: f64) -> f64 {
        self.width / pulse_freq
    }

    /// True when the two circular pulse intervals intersect.
    pub fn pulses_overlap(&self) -> bool {
        let gap = wrap_unit(self.onset_neg - self.onset_pos);
        self.width > gap || self.width > 1.0 - gap
    }

    /// Value of the train at normalized time `x`.
    pub fn value_at(&self, x: f64) -> f64 {
        let inside = |onset: f64| wrap_unit(x - onset) < self.width;
        let mut v = 0.0;
        if inside(self.onset_pos) {
            v += 1.0;
        }
        if inside(self.onset_neg) {
            v -= 1.0;
        }
        v
    }

    /// Pulse edges in `[0, 1)`.
    pub fn edges(&self) -> [f64; 4] {
        [self.onset_pos, wrap_unit(self.onset_pos + self.width), self.onset_neg, wrap_unit(self.onset_neg + self.width)]
    }

    /// Real waveform sampled over one period with the given rule.
    pub fn sample(&self, samples: usize, sampling: Sampling) -> Vec<f64> {
        let s = samples as f64;
        (0..samples)
            .map(|k| {
                let center = (k as f64 + 0.5) / s;
                sampling.pulse_weight(self.onset_pos, self.width, center, s)
                    - sampling.pulse_weight(self.onset_neg, self.width, center, s)
            })
            .collect()
    }
}

/// One switched signal path: a carrier phase and its pulse train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathDrive {
    /// Carrier phase of the path in radians (0, -pi/2, ...).
    pub phase: f64,
    pub train: PulseTrain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementSchedule {
    /// 0-based element index.
    pub index: usize,
    pub paths: Vec<PathDrive>,
}

impl ElementSchedule {
    /// Complex envelope at normalized time `x`: the phase-weighted sum of all
    /// path trains.
    pub fn envelope_at(&self, x: f64) -> Complex64 {
        self.paths.iter().map(|p| Complex64::from_polar(1.0, p.phase) * p.train.value_at(x)).sum()
    }

    /// Sorted, deduplicated pulse edges of all paths.
    pub fn edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.paths.iter().flat_map(|p| p.train.edges()).collect();
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }

    fn check_overlap(&self) -> Result<()> {
        match self.paths.iter().position(|p| p.train.pulses_overlap()) {
            Some(path) => Err(Error::OverlappingPulses { element: self.index, path }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySchedule {
    pub config: ArrayConfig,
    /// Duty cycle ratio `alpha`: pulse width over the peak-mode width `T_p/3`.
    pub duty_ratio: f64,
    /// Steering angle in radians from broadside.
    pub steer_angle: f64,
    pub elements: Vec<ElementSchedule>,
}

/// Invariant checked by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    NoElements,
    SpacingNotPositive,
    FrequencyNotPositive,
    CarrierNotDominant,
    IntermediateFrequencyAliasing,
    ExcitationCount,
    ExcitationNotPositive,
    DutyRatioOutOfRange,
    ElementCountMismatch,
    ElementIndexMismatch,
    PathCountMismatch,
    PhasesNotDistinct,
    WidthNotPositive,
    WidthExceedsThird,
    WidthMismatch,
    PulsesOverlap,
}

impl Rule {
    pub fn message(self) -> &'static str {
        match self {
            Rule::NoElements => "array has no elements",
            Rule::SpacingNotPositive => "element spacing not positive",
            Rule::FrequencyNotPositive => "frequencies not positive",
            Rule::CarrierNotDominant => "carrier frequency below 10x pulse frequency",
            Rule::IntermediateFrequencyAliasing => "pulse frequency not above 2x IF",
            Rule::ExcitationCount => "excitation count differs from element count",
            Rule::ExcitationNotPositive => "excitation not positive",
            Rule::DutyRatioOutOfRange => "duty ratio outside (0, 1]",
            Rule::ElementCountMismatch => "element schedule count differs from config",
            Rule::ElementIndexMismatch => "element index out of order",
            Rule::PathCountMismatch => "path count differs from config",
            Rule::PhasesNotDistinct => "phases not distinct",
            Rule::WidthNotPositive => "width not positive",
            Rule::WidthExceedsThird => "width exceeds T_p/3",
            Rule::WidthMismatch => "width differs from alpha*T_p/3",
            Rule::PulsesOverlap => "positive and negative pulses overlap",
        }
    }
}

/// One broken invariant, located by element and path where applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub element: Option<usize>,
    pub path: Option<usize>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.element, self.path) {
            (Some(e), Some(p)) => write!(f, "element {e}, path {p}: {}", self.rule.message()),
            (Some(e), None) => write!(f, "element {e}: {}", self.rule.message()),
            _ => write!(f, "{}", self.rule.message()),
        }
    }
}

const WIDTH_TOL: f64 = 1e-12;

/// Lists every broken schedule invariant. Empty means well formed.
pub fn validate(schedule: &ArraySchedule) -> Vec<Violation> {
    let mut out = schedule.config.violations();
    let alpha = schedule.duty_ratio;
    if !(alpha > 0.0 && alpha <= 1.0) {
        out.push(Violation { element: None, path: None, rule: Rule::DutyRatioOutOfRange });
    }
    if schedule.elements.len() != schedule.config.n_elements {
        out.push(Violation { element: None, path: None, rule: Rule::ElementCountMismatch });
    }
    let expected_width = alpha * PEAK_WIDTH;
    let n_paths = schedule.config.path_count.count();
    for (i, el) in schedule.elements.iter().enumerate() {
        let at = |path: Option<usize>, rule| Violation { element: Some(i), path, rule };
        if el.index != i {
            out.push(at(None, Rule::ElementIndexMismatch));
        }
        if el.paths.len() != n_paths {
            out.push(at(None, Rule::PathCountMismatch));
        }
        for (j, p) in el.paths.iter().enumerate() {
            let dup = el.paths[..j].iter().any(|q| wrap_phase(q.phase - p.phase).abs() < 1e-9);
            if dup {
                out.push(at(Some(j), Rule::PhasesNotDistinct));
            }
            let w = p.train.width;
            if !(w > 0.0) {
                out.push(at(Some(j), Rule::WidthNotPositive));
                continue;
            }
            if w > PEAK_WIDTH + WIDTH_TOL {
                out.push(at(Some(j), Rule::WidthExceedsThird));
            }
            if (w - expected_width).abs() > WIDTH_TOL {
                out.push(at(Some(j), Rule::WidthMismatch));
            }
            if p.train.pulses_overlap() {
                out.push(at(Some(j), Rule::PulsesOverlap));
            }
        }
    }
    out
}

/// How a continuous pulse waveform is turned into samples.
///
/// Samples sit at bin midpoints `(k + 1/2)/S`. `Midpoint` takes the waveform
/// value there. `BoxAverage` and `HatAverage` integrate the waveform exactly
/// against a unit-area box of width `1/S` or a triangle of half-width `1/S`;
/// their DFT equals the true coefficients times the window response
/// [`Sampling::aperture`] plus aliases that fall off as `1/S^2` and `1/S^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    Midpoint,
    BoxAverage,
    HatAverage,
}

impl Sampling {
    /// Window frequency response at harmonic `m` for `samples` bins per period.
    pub fn aperture(self, m: i32, samples: usize) -> f64 {
        let x = PI * m as f64 / samples as f64;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        match self {
            Sampling::Midpoint => 1.0,
            Sampling::BoxAverage => sinc,
            Sampling::HatAverage => sinc * sinc,
        }
    }

    /// Window mass to the left of `u` bins from the sample center.
    fn cdf(self, u: f64) -> f64 {
        match self {
            Sampling::Midpoint => {
                if u >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Sampling::BoxAverage => (u + 0.5).clamp(0.0, 1.0),
            Sampling::HatAverage => {
                if u <= -1.0 {
                    0.0
                } else if u <= 0.0 {
                    0.5 * (1.0 + u) * (1.0 + u)
                } else if u < 1.0 {
                    1.0 - 0.5 * (1.0 - u) * (1.0 - u)
                } else {
                    1.0
                }
            }
        }
    }

    /// Weight of the circular interval `[onset, onset + width)` seen by the
    /// sample centered at `center`.
    fn pulse_weight(self, onset: f64, width: f64, center: f64, samples: f64) -> f64 {
        [-1.0, 0.0, 1.0]
            .iter()
            .map(|shift| {
                let start = onset + shift;
                let end = start + width;
                self.cdf(samples * (center - start)) - self.cdf(samples * (center - end))
            })
            .sum()
    }
}

/// Combined complex envelope of one element over a period, midpoint sampled.
pub fn synthesize_envelope(element: &ElementSchedule, samples_per_period: usize) -> Result<Vec<Complex64>> {
    synthesize_envelope_with(element, samples_per_period, Sampling::Midpoint)
}

pub fn synthesize_envelope_with(
    element: &ElementSchedule,
    samples_per_period: usize,
    sampling: Sampling,
) -> Result<Vec<Complex64>> {
    if samples_per_period < MIN_SAMPLES {
        return Err(Error::TooFewSamples(samples_per_period));
    }
    element.check_overlap()?;
    let mut env = vec![Complex64::new(0.0, 0.0); samples_per_period];
    for path in &element.paths {
        let rot = Complex64::from_polar(1.0, path.phase);
        for (e, v) in env.iter_mut().zip(path.train.sample(samples_per_period, sampling)) {
            *e += rot * v;
        }
    }
    Ok(env)
}

/// Fourier-series coefficients `m = -m_max..=m_max` estimated from a sampled
/// period by FFT, with the sampling window response divided out.
pub fn dft_coefficients(samples: &[Complex64], sampling: Sampling, m_max: i32) -> Result<Vec<Complex64>> {
    let s = samples.len();
    if s < MIN_SAMPLES {
        return Err(Error::TooFewSamples(s));
    }
    if m_max < 0 || 2 * m_max as usize >= s {
        return Err(Error::Input(format!("harmonic range {m_max} exceeds Nyquist for {s} samples")));
    }
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(s).process(&mut buf);
    let scale = 1.0 / s as f64;
    Ok((-m_max..=m_max)
        .map(|m| {
            let bin = buf[(m as i64).rem_euclid(s as i64) as usize];
            // samples sit at bin midpoints
            let shift = Complex64::from_polar(1.0, -PI * m as f64 / s as f64);
            bin * shift * scale / sampling.aperture(m, s)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(phase: f64, train: PulseTrain) -> ElementSchedule {
        ElementSchedule { index: 0, paths: vec![PathDrive { phase, train }] }
    }

    #[test]
    fn wrap_unit_stays_in_range() {
        assert_eq!(wrap_unit(-0.25), 0.75);
        assert_eq!(wrap_unit(1.0), 0.0);
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert!(wrap_unit(-1e-17) < 1.0);
    }

    #[test]
    fn sample_inside_positive_pulse_is_one() {
        let el = single(0.0, PulseTrain::new(0.0, 0.5, 1.0 / 3.0));
        let env = synthesize_envelope(&el, 64).unwrap();
        assert_eq!(env[5], Complex64::new(1.0, 0.0));
        assert_eq!(env[40], Complex64::new(-1.0, 0.0));
        assert_eq!(env[60], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn wrapping_pulse_covers_period_boundary() {
        let t = PulseTrain::new(0.9, 0.4, 0.2);
        assert_eq!(t.value_at(0.95), 1.0);
        assert_eq!(t.value_at(0.05), 1.0);
        assert_eq!(t.value_at(0.15), 0.0);
        assert_eq!(t.value_at(0.5), -1.0);
    }

    #[test]
    fn overlap_detection() {
        assert!(!PulseTrain::new(0.0, 0.5, 1.0 / 3.0).pulses_overlap());
        assert!(PulseTrain::new(0.0, 0.2, 0.3).pulses_overlap());
        assert!(PulseTrain::new(0.8, 0.1, 0.35).pulses_overlap());
        let el = single(0.0, PulseTrain::new(0.0, 0.2, 0.3));
        assert!(matches!(synthesize_envelope(&el, 64), Err(Error::OverlappingPulses { element: 0, path: 0 })));
    }

    #[test]
    fn too_few_samples_rejected() {
        let el = single(0.0, PulseTrain::new(0.0, 0.5, 0.2));
        assert!(matches!(synthesize_envelope(&el, 63), Err(Error::TooFewSamples(63))));
    }

    #[test]
    fn averaged_sampling_preserves_area() {
        let t = PulseTrain::new(0.123_456, 0.623_456, 0.2);
        for sampling in [Sampling::BoxAverage, Sampling::HatAverage] {
            let area: f64 = (0..256)
                .map(|k| sampling.pulse_weight(t.onset_pos, t.width, (k as f64 + 0.5) / 256.0, 256.0))
                .sum::<f64>()
                / 256.0;
            assert!((area - 0.2).abs() < 1e-12, "{sampling:?} {area}");
        }
    }

    #[test]
    fn config_validation() {
        let ok = ArrayConfig::with_spacing_wavelengths(5, 0.5, 77e9, 1e9, PathCount::Four);
        assert!(ok.violations().is_empty());
        let slow = ArrayConfig::with_spacing_wavelengths(5, 0.5, 5e9, 1e9, PathCount::Four);
        assert_eq!(slow.violations()[0].rule, Rule::CarrierNotDominant);
        let alias = ok.clone().with_if_freq(0.6e9);
        assert_eq!(alias.violations()[0].rule, Rule::IntermediateFrequencyAliasing);
        let bad_exc = ok.clone().with_excitations(vec![1.0, 1.0]);
        assert_eq!(bad_exc.violations()[0].rule, Rule::ExcitationCount);
        assert!((ok.spacing_wavelengths() - 0.5).abs() < 1e-15);
    }
}

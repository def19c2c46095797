//! Closed-form switching schedules for 4-path and 8-path elements.
//!
//! Every train pairs a positive pulse at `t` with a negative pulse at
//! `t + T_p/2`, which removes all even harmonics. Relative to the steering
//! onset `t_1n` of the 0-phase path:
//!
//! | path phase | positive onset            |
//! |------------|---------------------------|
//! | 0          | `t_1n`                    |
//! | -pi/2      | `t_1n - 1/4`              |
//! | -pi        | `t_1n - 1/3`              |
//! | -3pi/2     | `t_1n - 1/3 - 1/4`        |
//!
//! The quarter-period shift between quadrature paths cancels `m = 4k - 1`;
//! the third-period shift between opposite paths cancels every `m = 3k`
//! for any pulse width. The 8-path layout adds a second family at phases
//! -pi/4 .. -7pi/4 with the same internal structure, shifted by
//! `3/40` of a period, which cancels `m = 5`.

use std::f64::consts::PI;

use crate::array_model::{
    wrap_unit, ArrayConfig, ArraySchedule, ElementSchedule, PathCount, PathDrive, PulseTrain, PEAK_WIDTH,
};
use crate::error::{Error, Result};

/// Offset between positive and negative pulse onsets of one train.
pub const POLARITY_OFFSET: f64 = 0.5;
/// Onset shift of a quadrature (-pi/2) path relative to its in-phase path.
pub const QUADRATURE_OFFSET: f64 = -0.25;
/// Onset shift of an opposite-phase path; cancels harmonic -3 at any width.
pub const OPPOSITE_OFFSET: f64 = -1.0 / 3.0;
/// Onset shift of the -pi/4 family relative to the 0 family; cancels harmonic 5.
pub const OCTANT_OFFSET: f64 = 3.0 / 40.0;

/// Normalized onset `t_1n / T_p` that steers harmonic 1 of element `n`
/// (0-based) toward `steer_angle`, wrapped into `[0, 1)`.
pub fn steering_onset(n: usize, steer_angle: f64, config: &ArrayConfig) -> Result<f64> {
    if !(steer_angle.abs() < PI / 2.0) {
        return Err(Error::SteerAngle(steer_angle));
    }
    let progression = n as f64 * config.electrical_spacing() * steer_angle.sin() / PI;
    Ok(wrap_unit(0.5 * (progression - 0.5)))
}

/// Onset offset `k/|m|` (in periods) between two equal-width trains on
/// phase-opposed paths that cancels harmonic `m`. `k = 0` gives 0, which
/// cancels nothing.
pub fn elimination_offset(m: i32, k: i32) -> Result<f64> {
    if m == 0 {
        return Err(Error::ZeroHarmonic);
    }
    Ok(k as f64 / m.unsigned_abs() as f64)
}

/// Onset shift `(8k + 3) / (8m)` of the -pi/4 path family relative to the
/// 0-phase family that cancels harmonic `m`.
pub fn octant_offset(m: i32, k: i32) -> Result<f64> {
    if m == 0 {
        return Err(Error::ZeroHarmonic);
    }
    Ok((8 * k + 3) as f64 / (8 * m) as f64)
}

/// (phase, onset shift) of the four paths in one quadrature family.
fn family(base_phase: f64, base_shift: f64) -> [(f64, f64); 4] {
    [
        (base_phase, base_shift),
        (base_phase - PI / 2.0, base_shift + QUADRATURE_OFFSET),
        (base_phase - PI, base_shift + OPPOSITE_OFFSET),
        (base_phase - 3.0 * PI / 2.0, base_shift + OPPOSITE_OFFSET + QUADRATURE_OFFSET),
    ]
}

/// Path layout (carrier phase, onset shift relative to `t_1n`) for a path
/// count. The 4-path family comes first.
pub fn path_layout(paths: PathCount) -> Vec<(f64, f64)> {
    let mut out = family(0.0, 0.0).to_vec();
    if paths == PathCount::Eight {
        out.extend(family(-PI / 4.0, OCTANT_OFFSET));
    }
    out
}

/// Builds the full array schedule for a steering angle and duty ratio.
pub fn design_schedule(config: &ArrayConfig, steer_angle: f64, duty_ratio: f64) -> Result<ArraySchedule> {
    if !(duty_ratio > 0.0 && duty_ratio <= 1.0) {
        return Err(Error::DutyRatio(duty_ratio));
    }
    config.check()?;
    let width = duty_ratio * PEAK_WIDTH;
    let layout = path_layout(config.path_count);
    let elements = (0..config.n_elements)
        .map(|n| {
            let t1 = steering_onset(n, steer_angle, config)?;
            let paths = layout
                .iter()
                .map(|&(phase, shift)| {
                    let on = t1 + shift;
                    PathDrive { phase, train: PulseTrain::new(on, on + POLARITY_OFFSET, width) }
                })
                .collect();
            Ok(ElementSchedule { index: n, paths })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ArraySchedule { config: config.clone(), duty_ratio, steer_angle, elements })
}

//! Self-checks of a schedule: invariants, carrier and harmonic suppression,
//! and the analytic-versus-sampled coefficient oracle.

use serde::Serialize;

use crate::array_model::{dft_coefficients, synthesize_envelope_with, validate, ArraySchedule, PathCount, Sampling};
use crate::error::Result;
use crate::harmonic_analysis::combined_coefficient;

pub const DEFAULT_ORACLE_SAMPLES: usize = 1 << 14;
pub const DEFAULT_ORACLE_M_MAX: i32 = 25;

/// Suppressed harmonics are at most this fraction of harmonic 1.
pub const SUPPRESSION_TOL: f64 = 1e-12;

/// Oracle tolerance at `samples` bins per period: `1e-6` from `2^14` bins up,
/// growing as `S^-3` below that, the convergence order of the hat-window
/// estimate.
pub fn oracle_tolerance(samples: usize) -> f64 {
    let ratio = DEFAULT_ORACLE_SAMPLES as f64 / samples as f64;
    (1e-8 * ratio.powi(3)).max(1e-6)
}

/// True for harmonics the designed schedule cancels.
pub fn designed_suppressed(m: i32, paths: PathCount) -> bool {
    m % 2 == 0 || m % 3 == 0 || m.rem_euclid(4) == 3 || (paths == PathCount::Eight && m == 5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub limit: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub passed: bool,
    pub samples: usize,
    pub m_max: i32,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {}: worst {:.3e} (limit {:.1e}) {}\n", c.name, c.worst, c.limit, c.detail));
        }
        s.push_str(if self.passed { "all checks passed\n" } else { "verification failed\n" });
        s
    }
}

/// Worst ratio over elements and `ms` of `|A_mn| / |A_1n|`, with its location.
fn worst_ratio(schedule: &ArraySchedule, ms: &[i32]) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for el in &schedule.elements {
        let a1 = combined_coefficient(el, 1).norm();
        for &m in ms {
            let r = combined_coefficient(el, m).norm() / a1;
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if r > worst.0 || worst.1.is_empty() {
                worst = (r, format!("element {} m={m}", el.index));
            }
        }
    }
    worst
}

fn check(name: &str, worst: f64, limit: f64, detail: String) -> Check {
    Check { name: name.into(), passed: worst < limit, worst, limit, detail }
}

pub fn verify(schedule: &ArraySchedule, m_max: i32, samples: usize) -> Result<Report> {
    let mut checks = Vec::new();

    let violations = validate(schedule);
    checks.push(Check {
        name: "invariants".into(),
        passed: violations.is_empty(),
        worst: violations.len() as f64,
        limit: 1.0,
        detail: violations.first().map(|v| v.to_string()).unwrap_or_default(),
    });

    let (w, at) = worst_ratio(schedule, &[0]);
    checks.push(check("carrier", w, SUPPRESSION_TOL, at));

    let paths = schedule.config.path_count;
    let ms: Vec<i32> = (-m_max..=m_max).filter(|&m| m != 0 && designed_suppressed(m, paths)).collect();
    let (w, at) = worst_ratio(schedule, &ms);
    checks.push(check("suppression", w, SUPPRESSION_TOL, at));

    let oracle_m = m_max.min((samples as i32 - 1) / 2);
    let tol = oracle_tolerance(samples);
    let mut worst = (0.0, String::new());
    for el in &schedule.elements {
        let env = synthesize_envelope_with(el, samples, Sampling::HatAverage)?;
        let dft = dft_coefficients(&env, Sampling::HatAverage, oracle_m)?;
        let exact: Vec<_> = (-oracle_m..=oracle_m).map(|m| combined_coefficient(el, m)).collect();
        let scale = exact.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for (k, (d, a)) in dft.iter().zip(&exact).enumerate() {
            let e = (d - a).norm() / scale;
            if e > worst.0 || worst.1.is_empty() {
                worst = (e, format!("element {} m={}", el.index, k as i32 - oracle_m));
            }
        }
    }
    checks.push(check("oracle", worst.0, tol, worst.1));

    Ok(Report { passed: checks.iter().all(|c| c.passed), samples, m_max, checks })
}

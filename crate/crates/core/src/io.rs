//! Stable file formats: schedule JSON documents, constellation CSV and
//! fixed-precision number formatting.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array_model::{validate, ArrayConfig, ArraySchedule, ElementSchedule, PathCount, PathDrive, PulseTrain};
use crate::error::{Error, Result};

/// Rounds to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub elements: usize,
    pub spacing_wavelengths: f64,
    pub f0_hz: f64,
    pub fp_hz: f64,
    pub paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excitations: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDoc {
    pub phase_deg: f64,
    pub onset_pos_norm: f64,
    pub onset_neg_norm: f64,
    pub width_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub index: usize,
    pub paths: Vec<PathDoc>,
}

/// Schedule as written to disk. Times are normalized by `T_p`, angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub config: ConfigDoc,
    pub alpha: f64,
    pub theta_deg: f64,
    pub elements: Vec<ElementDoc>,
}

impl ScheduleDocument {
    pub fn from_schedule(s: &ArraySchedule) -> Self {
        let c = &s.config;
        let uniform = c.excitations.iter().all(|&i| i == 1.0);
        ScheduleDocument {
            config: ConfigDoc {
                elements: c.n_elements,
                spacing_wavelengths: round_sig(c.spacing_wavelengths()),
                f0_hz: round_sig(c.carrier_freq),
                fp_hz: round_sig(c.pulse_freq),
                paths: c.path_count.count(),
                excitations: (!uniform).then(|| c.excitations.iter().map(|&i| round_sig(i)).collect()),
            },
            alpha: round_sig(s.duty_ratio),
            theta_deg: round_sig(s.steer_angle.to_degrees()),
            elements: s
                .elements
                .iter()
                .map(|e| ElementDoc {
                    index: e.index,
                    paths: e
                        .paths
                        .iter()
                        .map(|p| PathDoc {
                            phase_deg: round_sig(p.phase.to_degrees()),
                            onset_pos_norm: round_sig(p.train.onset_pos),
                            onset_neg_norm: round_sig(p.train.onset_neg),
                            width_norm: round_sig(p.train.width),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds the schedule. Structural problems are errors; invariant
    /// violations are left for [`validate`].
    pub fn to_schedule(&self) -> Result<ArraySchedule> {
        let c = &self.config;
        let paths = PathCount::from_count(c.paths)
            .ok_or_else(|| Error::Input(format!("path count {} must be 4 or 8", c.paths)))?;
        let mut config =
            ArrayConfig::with_spacing_wavelengths(c.elements, c.spacing_wavelengths, c.f0_hz, c.fp_hz, paths);
        if let Some(exc) = &c.excitations {
            config = config.with_excitations(exc.clone());
        }
        config.check()?;
        let elements = self
            .elements
            .iter()
            .map(|e| ElementSchedule {
                index: e.index,
                paths: e
                    .paths
                    .iter()
                    .map(|p| PathDrive {
                        phase: p.phase_deg.to_radians(),
                        train: PulseTrain::new(p.onset_pos_norm, p.onset_neg_norm, p.width_norm),
                    })
                    .collect(),
            })
            .collect();
        Ok(ArraySchedule { config, duty_ratio: self.alpha, steer_angle: self.theta_deg.to_radians(), elements })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Parses a schedule document and rejects schedules with broken invariants.
pub fn read_schedule(text: &str) -> Result<ArraySchedule> {
    let s = ScheduleDocument::from_json(text)?.to_schedule()?;
    let v = validate(&s);
    match v.first() {
        None => Ok(s),
        Some(first) => Err(Error::InvalidSchedule { count: v.len(), first: first.to_string() }),
    }
}

/// Schedule passed through its on-disk form, so inline and file-based runs
/// see identical numbers.
pub fn canonical(schedule: &ArraySchedule) -> Result<ArraySchedule> {
    ScheduleDocument::from_schedule(schedule).to_schedule()
}

/// Reads `i,q` rows. A first row that is not numeric is taken as a header.
pub fn read_constellation(text: &str) -> Result<Vec<Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Constellation(e.to_string()))?;
        if record.len() != 2 {
            return Err(Error::Constellation(format!("row {} has {} fields, expected 2", row + 1, record.len())));
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => out.push(Complex64::new(v[0], v[1])),
            Err(_) if row == 0 => continue,
            Err(e) => return Err(Error::Constellation(format!("row {}: {e}", row + 1))),
        }
    }
    if out.is_empty() {
        return Err(Error::Constellation("no symbols".into()));
    }
    Ok(out)
}

/// Fixed-decimal formatting for CSV cells; `-0` is written as `0`.
pub fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule_design::design_schedule;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_sig(77e9), 77e9);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn document_round_trip() {
        let cfg = ArrayConfig::with_spacing_wavelengths(5, 0.5, 77e9, 1e9, PathCount::Eight)
            .with_excitations(vec![1.0, 0.5, 0.25, 0.5, 1.0]);
        let s = design_schedule(&cfg, 0.35, 0.6).unwrap();
        let doc = ScheduleDocument::from_schedule(&s);
        let json = doc.to_json().unwrap();
        let back = ScheduleDocument::from_json(&json).unwrap();
        assert_eq!(doc, back);
        assert_eq!(back.to_json().unwrap(), json);
        let s2 = read_schedule(&json).unwrap();
        assert_eq!(ScheduleDocument::from_schedule(&s2).to_json().unwrap(), json);
    }

    #[test]
    fn constellation_csv() {
        let pts = read_constellation("i,q\n3,3\n-1, 1\n").unwrap();
        assert_eq!(pts, vec![Complex64::new(3.0, 3.0), Complex64::new(-1.0, 1.0)]);
        assert_eq!(read_constellation("1,1\n").unwrap().len(), 1);
        assert!(read_constellation("i,q\n").is_err());
        assert!(read_constellation("1,2,3\n").is_err());
        assert!(read_constellation("1,1\nx,2\n").is_err());
    }

    #[test]
    fn fixed_format() {
        assert_eq!(fixed(-0.00001, 3), "0.000");
        assert_eq!(fixed(-1.5, 2), "-1.50");
        assert_eq!(fixed(2.0, 0), "2");
    }
}

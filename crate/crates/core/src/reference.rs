//! Published reference curves and fitted circuit parameter sets.

use serde::Deserialize;

use crate::circuit_model::CircuitParams;
use crate::error::{Error, Result};

pub const EFFICIENCY_CURVES_CSV: &str = include_str!("../reference/efficiency_curves.csv");
pub const PBO_CURVE_CSV: &str = include_str!("../reference/pbo_curve.csv");
pub const CIRCUIT_FIT_200MHZ_JSON: &str = include_str!("../reference/circuit_fit_200MHz.json");
pub const CIRCUIT_FIT_2GHZ_JSON: &str = include_str!("../reference/circuit_fit_2GHz.json");

/// Series labels in the efficiency fixture.
pub const HARM_IDEAL_4PATH: &str = "harm_ideal_4path";
pub const HARM_IDEAL_8PATH: &str = "harm_ideal_8path";
pub const HARM_SIMULATED_4PATH: &str = "harm_simulated_4path";
pub const CIRC_MODEL_200MHZ: &str = "circ_model_200MHz";
pub const CIRC_MODEL_2GHZ: &str = "circ_model_2GHz";
pub const PBO_SIMULATED: &str = "pbo_simulated";

/// One point of a reference curve. `value` is a percentage or dB depending on the file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CurvePoint {
    pub ten_log_alpha: f64,
    #[serde(alias = "efficiency_percent", alias = "pbo_db")]
    pub value: f64,
    pub series_label: String,
}

/// Parses a three-column curve CSV with a header row.
pub fn parse_curves(text: &str) -> Result<Vec<CurvePoint>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e: csv::Error| Error::Input(e.to_string())))
        .collect()
}

/// Points of one series, in file order.
pub fn series<'a>(points: &'a [CurvePoint], label: &str) -> Vec<&'a CurvePoint> {
    points.iter().filter(|p| p.series_label == label).collect()
}

pub fn efficiency_curves() -> Vec<CurvePoint> {
    parse_curves(EFFICIENCY_CURVES_CSV).expect("bundled efficiency fixture")
}

pub fn pbo_curve() -> Vec<CurvePoint> {
    parse_curves(PBO_CURVE_CSV).expect("bundled back-off fixture")
}

pub fn circuit_fit_200mhz() -> CircuitParams {
    serde_json::from_str(CIRCUIT_FIT_200MHZ_JSON).expect("bundled circuit fit")
}

pub fn circuit_fit_2ghz() -> CircuitParams {
    serde_json::from_str(CIRCUIT_FIT_2GHZ_JSON).expect("bundled circuit fit")
}

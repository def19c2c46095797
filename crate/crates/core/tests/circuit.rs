use approx::assert_relative_eq;
use proptest::prelude::*;

use sths::array_model::{ArrayConfig, PathCount};
use sths::circuit_model::*;
use sths::reference::{self, CIRC_MODEL_200MHZ, CIRC_MODEL_2GHZ};

fn lossy(fp: f64) -> CircuitParams {
    CircuitParams {
        supply_voltage: 1.2,
        bias_current: 0.02,
        peak_voltage: 1.0,
        load_resistance: 25.0,
        switch_resistance: 54e3,
        switch_capacitance: 35e-15,
        pulse_freq: fp,
    }
}

fn ideal() -> CircuitParams {
    CircuitParams { switch_resistance: f64::INFINITY, switch_capacitance: 0.0, ..lossy(1e9) }
}

fn alpha(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[test]
fn dynamic_power_value() {
    assert_relative_eq!(lossy(1e9).dynamic_power(), 50.4e-6, max_relative = 1e-12);
}

#[test]
fn loss_free_limit() {
    let p = ideal();
    assert!(p.is_loss_free());
    let want = 1.0 / (2.0 * 25.0 * 1.2 * 0.02);
    assert_relative_eq!(want, 0.020 / 0.024, max_relative = 1e-15);
    for duty in [0.01, 0.2, 0.5, MAX_DUTY] {
        assert_relative_eq!(circuit_efficiency(&p, duty).unwrap(), want, max_relative = 1e-15);
    }
}

#[test]
fn breakdown_ratio_matches_closed_form() {
    for fp in [2e8, 1e9, 5e9] {
        let p = lossy(fp);
        for duty in [0.05, 0.3, MAX_DUTY] {
            let b = power_breakdown(&p, duty).unwrap();
            let direct =
                duty * p.output_power() / (duty * p.dc_power() + (1.0 - duty) * p.leakage_power() + p.dynamic_power());
            assert!((b.efficiency() - direct).abs() < 1e-12);
            assert!((circuit_efficiency(&p, duty).unwrap() - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn duty_out_of_range_is_rejected() {
    let p = lossy(1e9);
    assert!(circuit_efficiency(&p, 0.0).is_err());
    assert!(circuit_efficiency(&p, MAX_DUTY + 1e-9).is_err());
}

#[test]
fn width_scaling() {
    let p = params_from_width(&DensityParams::cmos65(100e-6), 1.2, 0.02, 1.0, 25.0, 1e9).unwrap();
    assert_relative_eq!(p.switch_capacitance, 35e-15, max_relative = 1e-12);
    assert_relative_eq!(p.switch_resistance, 54e3, max_relative = 1e-12);
    let q = params_from_width(&DensityParams::cmos65(200e-6), 1.2, 0.02, 1.0, 25.0, 1e9).unwrap();
    assert_relative_eq!(q.switch_capacitance, 2.0 * p.switch_capacitance, max_relative = 1e-12);
    assert_relative_eq!(q.switch_resistance, 0.5 * p.switch_resistance, max_relative = 1e-12);
    assert!(params_from_width(&DensityParams::cmos65(0.0), 1.2, 0.02, 1.0, 25.0, 1e9).is_err());
}

#[test]
fn fitted_parameters_track_model_curves() {
    let curves = reference::efficiency_curves();
    for (label, p) in
        [(CIRC_MODEL_200MHZ, reference::circuit_fit_200mhz()), (CIRC_MODEL_2GHZ, reference::circuit_fit_2ghz())]
    {
        let pts = reference::series(&curves, label);
        assert!(pts.len() >= 10, "{label}");
        for pt in pts {
            let model = 100.0 * circuit_efficiency(&p, duty_from_alpha(alpha(pt.ten_log_alpha))).unwrap();
            assert!((model - pt.value).abs() < 1.0, "{label} at {}: {model} vs {}", pt.ten_log_alpha, pt.value);
        }
    }
}

#[test]
fn refit_reproduces_fixture_parameters() {
    let curves = reference::efficiency_curves();
    let mut samples = Vec::new();
    for (label, fp) in [(CIRC_MODEL_200MHZ, 2e8), (CIRC_MODEL_2GHZ, 2e9)] {
        for pt in reference::series(&curves, label) {
            samples.push(EfficiencySample {
                duty: duty_from_alpha(alpha(pt.ten_log_alpha)),
                pulse_freq: fp,
                efficiency: pt.value / 100.0,
            });
        }
    }
    let fit = fit_loss_ratios(&samples).unwrap();
    let p = fit.to_params(1.2, 0.02, 25.0, 2e8).unwrap();
    let fixture = reference::circuit_fit_200mhz();
    assert_relative_eq!(p.peak_voltage, fixture.peak_voltage, max_relative = 1e-6);
    assert_relative_eq!(p.switch_resistance, fixture.switch_resistance, max_relative = 1e-6);
    assert_relative_eq!(p.switch_capacitance, fixture.switch_capacitance, max_relative = 1e-6);
}

#[test]
fn fit_recovers_synthetic_ratios() {
    let truth = LossRatios::from(&lossy(1e9));
    let samples: Vec<_> = [0.05, 0.2, 0.4, 0.6]
        .iter()
        .flat_map(|&d| {
            [2e8, 1e9, 3e9].map(|fp| EfficiencySample { duty: d, pulse_freq: fp, efficiency: truth.efficiency(d, fp) })
        })
        .collect();
    let fit = fit_loss_ratios(&samples).unwrap();
    assert_relative_eq!(fit.on_efficiency, truth.on_efficiency, max_relative = 1e-8);
    assert_relative_eq!(fit.leakage_ratio, truth.leakage_ratio, max_relative = 1e-6);
    assert_relative_eq!(fit.dynamic_ratio_per_hz, truth.dynamic_ratio_per_hz, max_relative = 1e-6);
}

#[test]
fn width_fit_recovers_synthetic_width() {
    let p = params_from_width(&DensityParams::cmos65(80e-6), 1.2, 0.02, 0.9, 25.0, 1e9).unwrap();
    let samples: Vec<_> = [0.1, 0.3, 0.6]
        .iter()
        .flat_map(|&d| {
            [5e8, 2e9].map(|fp| EfficiencySample {
                duty: d,
                pulse_freq: fp,
                efficiency: circuit_efficiency(&p.with_pulse_freq(fp), d).unwrap(),
            })
        })
        .collect();
    let (eta0, w) = fit_width(&samples, 0.35e-9, 5.4, 1.2, 0.02).unwrap();
    assert_relative_eq!(w, 80e-6, max_relative = 1e-9);
    assert_relative_eq!(eta0, p.output_power() / p.dc_power(), max_relative = 1e-9);
}

#[test]
fn sweep_rows() {
    let cfg = ArrayConfig::with_spacing_wavelengths(5, 0.5, 77e9, 1e9, PathCount::Four);
    let grid: Vec<f64> = (-10..=0).map(|d| alpha(d as f64)).collect();
    let rows = pbo_sweep(&cfg, Some(&lossy(1e9)), 20f64.to_radians(), &grid).unwrap();
    assert_eq!(rows.last().unwrap().pbo_db, 0.0);
    for r in &rows {
        assert!(r.pbo_db <= r.ten_log_alpha + 1e-12);
        let z = r.zeta_circ.unwrap();
        assert_relative_eq!(r.eta.unwrap(), z * r.zeta_harm, max_relative = 1e-15);
    }
    for w in rows.windows(2) {
        assert!(w[1].pbo_db > w[0].pbo_db);
    }
    let bare = pbo_sweep(&cfg, None, 0.0, &grid).unwrap();
    assert!(bare.iter().all(|r| r.zeta_circ.is_none() && r.eta.is_none()));
}

proptest! {
    #[test]
    fn efficiency_falls_with_pulse_frequency(fp in 1e7f64..1e10, k in 1.01f64..10.0, duty in 0.01f64..MAX_DUTY) {
        let a = circuit_efficiency(&lossy(fp), duty).unwrap();
        let b = circuit_efficiency(&lossy(fp * k), duty).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn efficiency_rises_with_duty(fp in 1e7f64..1e10, d in 0.01f64..0.6, dd in 1e-3f64..0.05) {
        let p = lossy(fp);
        prop_assert!(circuit_efficiency(&p, d + dd).unwrap() > circuit_efficiency(&p, d).unwrap());
    }

    #[test]
    fn efficiency_rises_with_off_resistance(r in 1e2f64..1e7, k in 1.01f64..10.0, duty in 0.01f64..0.6) {
        let a = CircuitParams { switch_resistance: r, ..lossy(1e9) };
        let b = CircuitParams { switch_resistance: r * k, ..lossy(1e9) };
        prop_assert!(circuit_efficiency(&b, duty).unwrap() > circuit_efficiency(&a, duty).unwrap());
    }

    #[test]
    fn lossy_never_beats_loss_free(fp in 1e7f64..1e10, duty in 0.01f64..MAX_DUTY) {
        prop_assert!(circuit_efficiency(&lossy(fp), duty).unwrap() < circuit_efficiency(&ideal(), duty).unwrap());
    }
}

mod args;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use sths::array_model::{ArrayConfig, ArraySchedule, PathCount};
use sths::circuit_model::{pbo_sweep, CircuitParams};
use sths::harmonic_analysis::{radiation_pattern, uniform_grid, PatternReference};
use sths::io::{canonical, fixed, read_constellation, read_schedule, round_sig, ScheduleDocument};
use sths::modulation::{plan_constellation, simulate_constellation, square_qam, Predistortion};
use sths::reference::parse_curves;
use sths::schedule_design::design_schedule;
use sths::verify::verify;
use sths::Error;

use args::{ArrayArgs, Cli, Command, DesignArgs, EfficiencyCmd, PatternCmd, QamCmd, VerifyCmd};

enum Failure {
    /// Usage or input problem, exit 2.
    Input(String),
    /// Verification ran and failed, exit 1.
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ").to_string();
            eprintln!("{}", json!({ "error": first }));
            return 2;
        }
    };
    let outcome = match cli.command {
        Command::Design(c) => design(&c.design, c.out.as_deref()),
        Command::Pattern(c) => pattern(&c),
        Command::Efficiency(c) => efficiency(&c),
        Command::Qam(c) => qam(&c),
        Command::Verify(c) => run_verify(&c),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Verify) => 1,
        Err(Failure::Input(msg)) => {
            eprintln!("{}", json!({ "error": msg }));
            2
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn config(a: &ArrayArgs) -> std::result::Result<ArrayConfig, Failure> {
    let paths = PathCount::from_count(a.paths.parse().unwrap_or(0))
        .ok_or_else(|| Failure::Input(format!("path count {} must be 4 or 8", a.paths)))?;
    let c = ArrayConfig::with_spacing_wavelengths(a.elements, a.spacing_wl, a.f0, a.fp, paths);
    c.check()?;
    Ok(c)
}

fn alpha_from_db(db: f64) -> std::result::Result<f64, Failure> {
    if !(db <= 0.0) || !db.is_finite() {
        return Err(Failure::Input(format!("alpha-db {db} must be finite and at most 0")));
    }
    Ok(10f64.powf(db / 10.0))
}

fn designed(d: &DesignArgs) -> std::result::Result<ArraySchedule, Failure> {
    let c = config(&d.array)?;
    let s = design_schedule(&c, d.array.theta_deg.to_radians(), alpha_from_db(d.alpha_db)?)?;
    Ok(canonical(&s)?)
}

fn circuit(path: Option<&Path>) -> std::result::Result<Option<CircuitParams>, Failure> {
    let Some(p) = path else { return Ok(None) };
    let params: CircuitParams =
        serde_json::from_str(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    params.validate()?;
    Ok(Some(params))
}

fn design(d: &DesignArgs, out: Option<&Path>) -> Outcome {
    let s = designed(d)?;
    emit(&ScheduleDocument::from_schedule(&s).to_json()?, out)
}

fn parse_harmonics(text: &str) -> std::result::Result<Vec<i32>, Failure> {
    let hs: std::result::Result<Vec<i32>, _> = text.split(',').map(|h| h.trim().parse::<i32>()).collect();
    match hs {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Failure::Input(format!("bad harmonic list {text:?}"))),
    }
}

fn pattern(c: &PatternCmd) -> Outcome {
    let harmonics = parse_harmonics(&c.harmonics)?;
    let s = match &c.schedule {
        Some(p) => read_schedule(&read(p)?)?,
        None => designed(&c.design)?,
    };
    let grid_deg = uniform_grid(c.theta_min, c.theta_max, c.theta_step)?;
    let grid: Vec<f64> = grid_deg.iter().map(|d| d.to_radians()).collect();
    let reference = if c.normalize == "peakmode" { PatternReference::PeakMode } else { PatternReference::SelfPeak };
    let p = radiation_pattern(&s, &harmonics, &grid, reference)?;
    let mut out = String::from("theta_deg");
    for m in &harmonics {
        write!(out, ",m_{m}_db").unwrap();
    }
    out.push('\n');
    for (deg, row) in grid_deg.iter().zip(&p.db) {
        out.push_str(&fixed(*deg, 4));
        for v in row {
            write!(out, ",{}", fixed(*v, 6)).unwrap();
        }
        out.push('\n');
    }
    emit(&out, c.out.as_deref())
}

/// Pulse frequency encoded in a series label such as `circ_model_200MHz`.
fn label_frequency(label: &str) -> Option<f64> {
    let tail = label.rsplit('_').next()?;
    let (num, scale) = match tail.strip_suffix("GHz") {
        Some(n) => (n, 1e9),
        None => (tail.strip_suffix("MHz")?, 1e6),
    };
    num.parse::<f64>().ok().map(|v| v * scale)
}

fn efficiency(c: &EfficiencyCmd) -> Outcome {
    let cfg = config(&c.array)?;
    let params = circuit(c.circuit.as_deref())?;
    let steer = c.array.theta_deg.to_radians();
    if let Some(path) = &c.compare {
        return compare(&cfg, params.as_ref(), steer, &read(path)?, c.series.as_deref(), c.out.as_deref());
    }
    let dbs = uniform_grid(c.alpha_db_min, c.alpha_db_max, c.alpha_db_step)?;
    let alphas = dbs.iter().map(|&d| alpha_from_db(d)).collect::<std::result::Result<Vec<_>, _>>()?;
    let rows = pbo_sweep(&cfg, params.as_ref(), steer, &alphas)?;
    let mut out = String::from("ten_log_alpha,zeta_harm,zeta_circ,eta,pbo_db\n");
    let opt = |v: Option<f64>| v.map(|x| fixed(x, 6)).unwrap_or_default();
    for (db, r) in dbs.iter().zip(&rows) {
        writeln!(
            out,
            "{},{},{},{},{}",
            fixed(*db, 4),
            fixed(r.zeta_harm, 6),
            opt(r.zeta_circ),
            opt(r.eta),
            fixed(r.pbo_db, 6)
        )
        .unwrap();
    }
    emit(&out, c.out.as_deref())
}

fn compare(
    cfg: &ArrayConfig,
    params: Option<&CircuitParams>,
    steer: f64,
    fixture: &str,
    only: Option<&str>,
    out_path: Option<&Path>,
) -> Outcome {
    let points = parse_curves(fixture)?;
    let mut out = String::from("series_label,ten_log_alpha,reference,model,delta\n");
    for p in points.iter().filter(|p| only.is_none_or(|s| s == p.series_label)) {
        let alpha = alpha_from_db(p.ten_log_alpha)?;
        let label = p.series_label.as_str();
        let model = if label.starts_with("harm_") {
            Some(pbo_sweep(cfg, None, steer, &[alpha])?[0].zeta_harm * 100.0)
        } else if label.starts_with("circ_") {
            match params {
                Some(q) => {
                    let q = label_frequency(label).map_or(*q, |f| q.with_pulse_freq(f));
                    pbo_sweep(cfg, Some(&q), steer, &[alpha])?[0].zeta_circ.map(|z| z * 100.0)
                }
                None => None,
            }
        } else if label.starts_with("pbo") {
            Some(pbo_sweep(cfg, None, steer, &[alpha])?[0].pbo_db)
        } else {
            None
        };
        let (m, d) = match model {
            Some(v) => (fixed(v, 4), fixed(v - p.value, 4)),
            None => (String::new(), String::new()),
        };
        writeln!(out, "{label},{},{},{m},{d}", fixed(p.ten_log_alpha, 4), fixed(p.value, 4)).unwrap();
    }
    emit(&out, out_path)
}

fn qam(c: &QamCmd) -> Outcome {
    let cfg = config(&c.array)?;
    let params = circuit(c.circuit.as_deref())?;
    let points = match &c.constellation {
        Some(p) => read_constellation(&read(p)?)?,
        None => square_qam(16)?,
    };
    let mode = match c.predistort.as_str() {
        "off" => Predistortion::Off,
        "circuit" => Predistortion::Circuit(
            params.ok_or_else(|| Failure::Input("--predistort circuit requires --circuit".into()))?,
        ),
        _ => Predistortion::Ideal,
    };
    let plans = plan_constellation(&points, &mode)?;
    let steer = c.array.theta_deg.to_radians();
    let result = simulate_constellation(&plans, &cfg, steer, params.as_ref())?;
    let plan_json: Vec<_> = plans
        .iter()
        .map(|p| {
            json!({
                "i": round_sig(p.symbol.re),
                "q": round_sig(p.symbol.im),
                "alpha": round_sig(p.duty_ratio),
                "ten_log_alpha": round_sig(10.0 * p.duty_ratio.log10()),
                "carrier_phase_deg": round_sig(p.carrier_phase.to_degrees()),
                "magnitude_target": round_sig(p.magnitude_target),
            })
        })
        .collect();
    let received: Vec<_> =
        result.received.iter().map(|r| json!({ "i": round_sig(r.re), "q": round_sig(r.im) })).collect();
    let doc = json!({
        "predistort": c.predistort,
        "evm_rms_percent": round_sig(result.evm_rms_percent),
        "plans": plan_json,
        "received": received,
    });
    if let Some(path) = &c.received_out {
        let mut csv = String::from("i,q\n");
        for r in &result.received {
            writeln!(csv, "{},{}", fixed(r.re, 9), fixed(r.im, 9)).unwrap();
        }
        emit(&csv, Some(path))?;
    }
    let mut text = serde_json::to_string_pretty(&doc).map_err(Error::from)?;
    text.push('\n');
    emit(&text, c.out.as_deref())
}

fn run_verify(c: &VerifyCmd) -> Outcome {
    if c.m_max < 1 {
        return Err(Failure::Input(format!("m-max {} must be positive", c.m_max)));
    }
    let s = match &c.schedule {
        Some(p) => ScheduleDocument::from_json(&read(p)?)?.to_schedule()?,
        None => designed(&c.design)?,
    };
    let report = verify(&s, c.m_max, c.samples)?;
    if c.json {
        let mut text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
        text.push('\n');
        print!("{text}");
    } else {
        print!("{}", report.to_text());
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

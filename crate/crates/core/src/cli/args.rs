use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sths", version, about = "Time-modulated transmitter array simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a switching schedule and write it as JSON.
    Design(DesignCmd),
    /// Radiation pattern of selected harmonics as CSV.
    Pattern(PatternCmd),
    /// Efficiency and back-off sweep over duty cycle ratios as CSV.
    Efficiency(EfficiencyCmd),
    /// Plan and simulate a QAM constellation.
    Qam(QamCmd),
    /// Check suppression and the sampled-envelope oracle.
    Verify(VerifyCmd),
}

#[derive(Debug, Args)]
pub struct ArrayArgs {
    #[arg(long, default_value_t = 5)]
    pub elements: usize,
    /// Element spacing in carrier wavelengths.
    #[arg(long = "spacing-wl", default_value_t = 0.5)]
    pub spacing_wl: f64,
    /// Carrier frequency in Hz.
    #[arg(long, default_value_t = 77e9)]
    pub f0: f64,
    /// Pulse frequency in Hz.
    #[arg(long, default_value_t = 1e9)]
    pub fp: f64,
    #[arg(long, default_value = "4", value_parser = ["4", "8"])]
    pub paths: String,
    /// Steering angle in degrees from broadside.
    #[arg(long = "theta-deg", default_value_t = 20.0, allow_negative_numbers = true)]
    pub theta_deg: f64,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    /// Duty cycle ratio as 10 log10(alpha).
    #[arg(long = "alpha-db", default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_db: f64,
}

#[derive(Debug, Args)]
pub struct DesignCmd {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PatternCmd {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Schedule JSON to use instead of the design flags.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Comma-separated harmonic indices.
    #[arg(long, default_value = "1,-3,5,-7", allow_hyphen_values = true)]
    pub harmonics: String,
    #[arg(long = "theta-min", default_value_t = -90.0, allow_negative_numbers = true)]
    pub theta_min: f64,
    #[arg(long = "theta-max", default_value_t = 90.0, allow_negative_numbers = true)]
    pub theta_max: f64,
    #[arg(long = "theta-step", default_value_t = 0.25)]
    pub theta_step: f64,
    #[arg(long, default_value = "self", value_parser = ["self", "peakmode"])]
    pub normalize: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EfficiencyCmd {
    #[command(flatten)]
    pub array: ArrayArgs,
    #[arg(long = "alpha-db-min", default_value_t = -10.0, allow_negative_numbers = true)]
    pub alpha_db_min: f64,
    #[arg(long = "alpha-db-max", default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_db_max: f64,
    #[arg(long = "alpha-db-step", default_value_t = 1.0)]
    pub alpha_db_step: f64,
    /// Circuit parameter JSON.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Reference curve CSV; emits per-point deltas instead of the sweep.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Restrict the comparison to one series label.
    #[arg(long, requires = "compare")]
    pub series: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QamCmd {
    #[command(flatten)]
    pub array: ArrayArgs,
    /// CSV of `i,q` rows; square 16-QAM when omitted.
    #[arg(long)]
    pub constellation: Option<PathBuf>,
    #[arg(long, default_value = "on", value_parser = ["on", "off", "circuit"])]
    pub predistort: String,
    /// Circuit parameter JSON; required for `--predistort circuit`, and when
    /// given the simulated amplitudes include the circuit droop.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Writes received points as `i,q` CSV.
    #[arg(long = "received-out")]
    pub received_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyCmd {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long = "m-max", default_value_t = 25)]
    pub m_max: i32,
    #[arg(long, default_value_t = 16384)]
    pub samples: usize,
    #[arg(long)]
    pub json: bool,
}

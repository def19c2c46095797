use thiserror::Error;

/// Errors produced by schedule construction, analysis and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid array configuration: {0}")]
    InvalidConfig(String),

    #[error("duty cycle ratio {0} outside (0, 1]")]
    DutyRatio(f64),

    #[error("steering angle {0} rad outside (-pi/2, pi/2)")]
    SteerAngle(f64),

    #[error("schedule violates {count} invariant(s); first: {first}")]
    InvalidSchedule { count: usize, first: String },

    #[error("positive and negative pulses overlap on element {element}, path {path}")]
    OverlappingPulses { element: usize, path: usize },

    #[error("at least 64 samples per period required, got {0}")]
    TooFewSamples(usize),

    #[error("harmonic index must be nonzero")]
    ZeroHarmonic,

    #[error("zero radiated power")]
    ZeroPower,

    #[error("imaginary residue {0:e} in harmonic power exceeds 1e-9")]
    ImaginaryResidue(f64),

    #[error("duty {0} outside (0, 2/3]")]
    Duty(f64),

    #[error("invalid circuit parameter: {0}")]
    CircuitParam(String),

    #[error("target amplitude {0} outside (0, 1]")]
    TargetAmplitude(f64),

    #[error("target amplitude {0} unreachable")]
    Unreachable(f64),

    #[error("invalid constellation: {0}")]
    Constellation(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::hierarchy::SlitCombination;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid octet: {0}")]
    InvalidOctet(String),

    #[error("expected a {expected}-slit combination, got {got}")]
    WrongCardinality {
        expected: usize,
        got: SlitCombination,
    },

    /// δ is at or below the floor: the data carry no two-path interference,
    /// so κ is undefined. This is the classical regime, not a violation.
    #[error("degenerate regime: delta {delta:e} <= floor {floor:e}")]
    Degenerate { delta: f64, floor: f64 },

    #[error("missing probability for subset {subset:#b} of a {order}-path set")]
    MissingSubset { order: usize, subset: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("quadrature did not converge after {levels} levels (residual {residual:e})")]
    QuadratureNonConvergence { levels: u32, residual: f64 },

    #[error("out of model: {0}")]
    OutOfModel(String),

    #[error("input {value:e} W outside meter range [0, {full_scale:e}] W")]
    OverRange { value: f64, full_scale: f64 },

    #[error("heralded source never triggers (pair_rate * trigger_efficiency = 0)")]
    CannotTerminate,

    #[error("fault on slit {slit} but combination {combination} does not contain it")]
    FaultSlitNotInCombination {
        combination: SlitCombination,
        slit: char,
    },

    #[error("pairwise term {pair} = {value:e} is within {tolerance:e} of zero; sign of |I| is ambiguous")]
    SignAmbiguous {
        pair: SlitCombination,
        value: f64,
        tolerance: f64,
    },

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("drift multiplier became non-positive ({multiplier:e}) at t = {time} s")]
    DriftNonPositive { time: f64, multiplier: f64 },

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("row {row}: {message}")]
    Ingest { row: usize, message: String },

    #[error("run {run}: {source}")]
    InRun { run: usize, source: Box<Error> },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Innermost error, looking through run wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::InRun { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.root(), Error::Degenerate { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

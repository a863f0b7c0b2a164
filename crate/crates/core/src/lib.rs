//! Simulation and analysis of the triple-slit interference hierarchy.
//!
//! The crate computes the third-order interference term ε, the pairwise
//! normaliser δ and their ratio κ from eight measurements (every subset of
//! three slits, including all closed), and provides the models needed to
//! produce such measurements in silico: scalar diffraction, detection laws,
//! photon sources and detectors with their systematic errors, the
//! randomised measurement protocol, and the error analysis.

pub mod detection;
pub mod error;
pub mod hierarchy;
pub mod instruments;
pub mod optics;
pub mod protocol;
pub mod rng;
pub mod scenario;
pub mod stats;

pub use detection::{detect, DetectionLaw};
pub use error::{Error, Result};
pub use hierarchy::{
    kappa, kappa_default, pairwise_interference, sorkin_delta, sorkin_epsilon, sorkin_term,
    EstimationMethod, KappaEstimate, ProbabilityOctet, Slit, SlitCombination,
};
pub use optics::{Propagator, SlitGeometry};
pub use protocol::{Experiment, KappaSeries, MeasurementMode, MeasurementRecord, RunPlan};
pub use scenario::Scenario;
pub use stats::{ErrorMethod, SeriesSummary};

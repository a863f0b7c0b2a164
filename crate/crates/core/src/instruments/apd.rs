use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-photon avalanche photodiode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApdModel {
    /// Seconds; non-paralyzable.
    pub dead_time: f64,
    /// Counts per second with no light.
    pub dark_rate: f64,
    pub efficiency: f64,
    /// Seconds; only used to turn dark counts into a per-trigger
    /// probability in heralded mode.
    pub coincidence_window: f64,
}

impl Default for ApdModel {
    fn default() -> Self {
        Self {
            dead_time: 50e-9,
            dark_rate: 100.0,
            efficiency: 0.65,
            coincidence_window: 2e-9,
        }
    }
}

impl ApdModel {
    pub fn validate(&self) -> Result<()> {
        let non_negative = |v: f64| v.is_finite() && v >= 0.0;
        if !non_negative(self.dead_time) {
            return Err(Error::config("apd.dead_time", "must be >= 0"));
        }
        if !non_negative(self.dark_rate) {
            return Err(Error::config("apd.dark_rate", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::config("apd.efficiency", "must lie in [0, 1]"));
        }
        if !non_negative(self.coincidence_window) {
            return Err(Error::config("apd.coincidence_window", "must be >= 0"));
        }
        Ok(())
    }
}

/// Registered count rate for a photon rate `true_rate` arriving at the
/// detector: `η r / (1 + η r τ) + dark`.
pub fn apd_observed_rate(true_rate: f64, model: &ApdModel) -> f64 {
    debug_assert!(true_rate >= 0.0, "negative photon rate {true_rate}");
    let detected = model.efficiency * true_rate.max(0.0);
    detected / (1.0 + detected * model.dead_time) + model.dark_rate
}

/// Poisson-distributed count with mean `mean_rate * duration`.
pub fn poisson_counts<R: Rng + ?Sized>(mean_rate: f64, duration: f64, rng: &mut R) -> u64 {
    let mean = mean_rate * duration;
    debug_assert!(mean.is_finite(), "non-finite Poisson mean");
    if mean.is_nan() || mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng) as u64
}

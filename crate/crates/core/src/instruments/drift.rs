use std::f64::consts::TAU;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Slow variation of the source flux, as a multiplier on the nominal rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriftModel {
    #[default]
    Constant,
    /// `1 + slope · t`, slope in 1/s.
    Linear { slope: f64 },
    /// `1 + amplitude · sin(2π t / period)`.
    Sinusoidal { amplitude: f64, period: f64 },
    /// Brownian multiplier with diffusion `step_sigma` per √s.
    RandomWalk { step_sigma: f64 },
}

impl DriftModel {
    /// Checks the multiplier stays positive for `t ∈ [0, horizon]` where
    /// that can be decided up front. Random walks are checked as they run.
    pub fn validate(&self, horizon: f64) -> Result<()> {
        match *self {
            DriftModel::Constant => Ok(()),
            DriftModel::Linear { slope } => {
                if !slope.is_finite() {
                    return Err(Error::config("drift.slope", "must be finite"));
                }
                let end = 1.0 + slope * horizon;
                if end <= 0.0 {
                    return Err(Error::config(
                        "drift.slope",
                        format!("flux multiplier reaches {end} within the {horizon} s session"),
                    ));
                }
                Ok(())
            }
            DriftModel::Sinusoidal { amplitude, period } => {
                if !(amplitude.is_finite() && amplitude.abs() < 1.0) {
                    return Err(Error::config(
                        "drift.amplitude",
                        "must satisfy |amplitude| < 1",
                    ));
                }
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::config("drift.period", "must be > 0"));
                }
                Ok(())
            }
            DriftModel::RandomWalk { step_sigma } => {
                if !(step_sigma.is_finite() && step_sigma >= 0.0) {
                    return Err(Error::config("drift.step_sigma", "must be >= 0"));
                }
                Ok(())
            }
        }
    }
}

/// A running realisation of a [`DriftModel`]. Queries must be made in
/// non-decreasing time order.
#[derive(Debug, Clone)]
pub struct DriftProcess {
    model: DriftModel,
    rng: SimRng,
    last_time: f64,
    last_value: f64,
}

impl DriftProcess {
    pub fn new(model: DriftModel, rng: SimRng) -> Self {
        Self {
            model,
            rng,
            last_time: 0.0,
            last_value: 1.0,
        }
    }

    pub fn multiplier_at(&mut self, time: f64) -> Result<f64> {
        let value = match self.model {
            DriftModel::Constant => 1.0,
            DriftModel::Linear { slope } => 1.0 + slope * time,
            DriftModel::Sinusoidal { amplitude, period } => {
                1.0 + amplitude * (TAU * time / period).sin()
            }
            DriftModel::RandomWalk { step_sigma } => {
                let dt = time - self.last_time;
                debug_assert!(dt >= 0.0, "drift queried backwards in time");
                if dt > 0.0 {
                    let z: f64 = StandardNormal.sample(&mut self.rng);
                    self.last_value += step_sigma * dt.sqrt() * z;
                }
                self.last_value
            }
        };
        self.last_time = self.last_time.max(time);
        if value.is_nan() || value <= 0.0 {
            return Err(Error::DriftNonPositive {
                time,
                multiplier: value,
            });
        }
        Ok(value)
    }
}

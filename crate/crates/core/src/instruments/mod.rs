//! Sources, detectors and their imperfections.
//!
//! Expected signals from [`crate::optics`] are in arbitrary units. The
//! source model fixes the absolute scale: the all-open combination at the
//! reference position (the central maximum) is mapped to `peak_power`,
//! `peak_rate` or `collection`, depending on the measurement mode.

mod apd;
mod drift;
mod faults;
mod heralded;
mod power_meter;

use serde::{Deserialize, Serialize};

pub use apd::{apd_observed_rate, poisson_counts, ApdModel};
pub use drift::{DriftModel, DriftProcess};
pub use faults::{apply_fault, TransmittanceFault, FAULT_MULTIPLIER_RANGE};
pub use heralded::{heralded_measurement, HeraldedOutcome, HeraldedSource};
pub use power_meter::{power_meter_reading, NonlinearityForm, PowerMeterModel};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceModel {
    /// Watts on the detector for ABC at the reference position.
    pub peak_power: f64,
    /// Photons per second on the detector for ABC at the reference position.
    pub peak_rate: f64,
    /// Stray light common to all eight combinations, as a fraction of the
    /// peak signal.
    pub background: f64,
    pub pair_rate: f64,
    pub trigger_efficiency: f64,
    pub signal_efficiency: f64,
    /// Probability that a heralded photon reaches the detector aperture
    /// for ABC at the reference position.
    pub collection: f64,
}

impl Default for SourceModel {
    fn default() -> Self {
        let h = HeraldedSource::default();
        Self {
            peak_power: 1e-6,
            peak_rate: 1.5e5,
            background: 0.0,
            pair_rate: h.pair_rate,
            trigger_efficiency: h.trigger_efficiency,
            signal_efficiency: h.signal_efficiency,
            collection: 0.05,
        }
    }
}

impl SourceModel {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !positive(self.peak_power) {
            return Err(Error::config("source.peak_power", "must be > 0"));
        }
        if !positive(self.peak_rate) {
            return Err(Error::config("source.peak_rate", "must be > 0"));
        }
        if !(self.background.is_finite() && self.background >= 0.0) {
            return Err(Error::config("source.background", "must be >= 0"));
        }
        if !(self.pair_rate.is_finite() && self.pair_rate >= 0.0) {
            return Err(Error::config("source.pair_rate", "must be >= 0"));
        }
        for (key, v) in [
            ("source.trigger_efficiency", self.trigger_efficiency),
            ("source.signal_efficiency", self.signal_efficiency),
            ("source.collection", self.collection),
        ] {
            if !unit(v) {
                return Err(Error::config(key, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn heralded(&self, trigger_quota: u64) -> HeraldedSource {
        HeraldedSource {
            pair_rate: self.pair_rate,
            trigger_efficiency: self.trigger_efficiency,
            signal_efficiency: self.signal_efficiency,
            trigger_quota,
        }
    }

    /// Maps a relative signal (1 = ABC at the reference position) to the
    /// same fraction of the peak, with stray light added and the total
    /// rescaled so the reference ABC value is exactly the peak.
    pub fn with_background(&self, relative: f64) -> f64 {
        (relative + self.background) / (1.0 + self.background)
    }
}

/// Everything between the slits and the recorded numbers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Instruments {
    pub power_meter: PowerMeterModel,
    pub apd: ApdModel,
    pub source: SourceModel,
    pub drift: DriftModel,
    pub faults: Vec<TransmittanceFault>,
}

impl Instruments {
    pub fn validate(&self) -> Result<()> {
        self.power_meter.validate()?;
        self.apd.validate()?;
        self.source.validate()?;
        for (i, f) in self.faults.iter().enumerate() {
            f.validate()
                .map_err(|e| Error::config(format!("faults[{i}]"), e.to_string()))?;
        }
        Ok(())
    }

    /// No nonlinearity, noise, dead time, dark counts, drift or faults.
    pub fn ideal() -> Self {
        Self {
            power_meter: PowerMeterModel {
                nonlinearity_fraction: 0.0,
                noise_sigma: 0.0,
                ..PowerMeterModel::default()
            },
            apd: ApdModel {
                dead_time: 0.0,
                dark_rate: 0.0,
                efficiency: 1.0,
                ..ApdModel::default()
            },
            source: SourceModel::default(),
            drift: DriftModel::Constant,
            faults: Vec::new(),
        }
    }
}

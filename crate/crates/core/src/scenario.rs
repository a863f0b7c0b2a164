//! Scenario files: everything needed to reproduce a simulation, in TOML.
//!
//! ```toml
//! name = "example"
//! law = "born"              # or "power:<p>"
//! propagator = "fresnel"    # or "fraunhofer"
//! error_method = "allan"    # or "standard"
//!
//! [geometry]     # SlitGeometry fields, SI units
//! [plan]         # RunPlan fields
//! [source]       # SourceModel fields
//! [power_meter]
//! [apd]
//! [drift]        # kind = "constant" | "linear" | "sinusoidal" | "random-walk"
//!
//! [[faults]]     # repeatable
//! combination = "BC"
//! slit = "B"
//! multiplier = 0.97   # or: shift = 8e-6 (metres of mask offset)
//! ```
//!
//! Every section and key is optional; unknown keys are rejected with
//! their full path.

use serde::{Deserialize, Serialize};

use crate::detection::DetectionLaw;
use crate::error::{Error, Result};
use crate::hierarchy::{Slit, SlitCombination};
use crate::instruments::{
    ApdModel, DriftModel, Instruments, PowerMeterModel, SourceModel, TransmittanceFault,
};
use crate::optics::{effective_transmission, Propagator, SlitGeometry};
use crate::protocol::{Experiment, RunPlan};
use crate::stats::ErrorMethod;

pub const PRESETS: [(&str, &str); 5] = [
    ("born-ideal", include_str!("../presets/born-ideal.toml")),
    ("power-meter", include_str!("../presets/power-meter.toml")),
    (
        "attenuated-apd",
        include_str!("../presets/attenuated-apd.toml"),
    ),
    ("heralded", include_str!("../presets/heralded.toml")),
    ("mask-fault", include_str!("../presets/mask-fault.toml")),
];

/// A transmittance fault as written in a scenario: either the multiplier
/// itself or the mask offset it comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    pub combination: SlitCombination,
    pub slit: Slit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<f64>,
    /// Lateral offset of the blocking-mask opening in front of `slit`, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
}

impl FaultSpec {
    pub fn resolve(&self, geom: &SlitGeometry, index: usize) -> Result<TransmittanceFault> {
        let path = |key: &str| format!("faults[{index}].{key}");
        let multiplier = match (self.multiplier, self.shift) {
            (Some(m), None) => m,
            (None, Some(shift)) => effective_transmission(
                geom.opening_width,
                geom.slit_widths[self.slit.index()],
                geom.mask_gap,
                shift,
                geom.wavelength,
            )
            .map_err(|e| Error::config(path("shift"), e.to_string()))?,
            _ => {
                return Err(Error::config(
                    path("multiplier"),
                    "give exactly one of `multiplier` or `shift`",
                ))
            }
        };
        TransmittanceFault::new(self.combination, self.slit, multiplier).map_err(|e| {
            let key = if matches!(e, Error::FaultSlitNotInCombination { .. }) {
                "slit"
            } else {
                "multiplier"
            };
            Error::config(path(key), e.to_string())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub name: String,
    pub law: DetectionLaw,
    pub propagator: Propagator,
    pub error_method: ErrorMethod,
    pub geometry: SlitGeometry,
    pub plan: RunPlan,
    pub source: SourceModel,
    pub power_meter: PowerMeterModel,
    pub apd: ApdModel,
    pub drift: DriftModel,
    pub faults: Vec<FaultSpec>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "custom".into(),
            law: DetectionLaw::Born,
            propagator: Propagator::Fresnel,
            error_method: ErrorMethod::Allan,
            geometry: SlitGeometry::default(),
            plan: RunPlan::default(),
            source: SourceModel::default(),
            power_meter: PowerMeterModel::default(),
            apd: ApdModel::default(),
            drift: DriftModel::Constant,
            faults: Vec::new(),
        }
    }
}

impl Scenario {
    /// Parses a scenario. Syntax and type errors are reported against the
    /// dotted key path.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| Error::config("<toml>", e.to_string().trim()))?;
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.message().trim().to_string();
            // some unknown keys are reported at the enclosing table
            let path = match unknown_key(&message) {
                Some(key) if path == "." => key.to_string(),
                Some(key) if path != key && !path.ends_with(&format!(".{key}")) => {
                    format!("{path}.{key}")
                }
                _ => path,
            };
            Error::config(path, message)
        })?;
        Ok(scenario)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let known: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
                Error::config(
                    "preset",
                    format!("unknown preset {name:?}; known: {}", known.join(", ")),
                )
            })?;
        Self::from_toml_str(text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<toml>", e.to_string()))
    }

    pub fn instruments(&self) -> Result<Instruments> {
        let faults = self
            .faults
            .iter()
            .enumerate()
            .map(|(i, f)| f.resolve(&self.geometry, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instruments {
            power_meter: self.power_meter.clone(),
            apd: self.apd.clone(),
            source: self.source.clone(),
            drift: self.drift,
            faults,
        })
    }

    /// Validates every parameter and prepares the experiment.
    pub fn experiment(&self) -> Result<Experiment> {
        Experiment::new(
            self.geometry.clone(),
            self.law,
            self.propagator,
            self.instruments()?,
            self.plan.clone(),
        )
    }
}

fn unknown_key(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

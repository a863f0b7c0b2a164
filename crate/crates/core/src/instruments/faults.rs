use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Slit, SlitCombination};
use crate::optics::TransmittanceTable;

/// Bounds on a fault multiplier; anything outside is treated as a typo.
pub const FAULT_MULTIPLIER_RANGE: (f64, f64) = (0.5, 1.5);

/// A transmittance change that applies to one slit only while one
/// particular combination is open, e.g. a misaligned opening in the
/// blocking mask for that combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmittanceFault {
    pub combination: SlitCombination,
    pub slit: Slit,
    pub multiplier: f64,
}

impl TransmittanceFault {
    pub fn new(combination: SlitCombination, slit: Slit, multiplier: f64) -> Result<Self> {
        let fault = Self {
            combination,
            slit,
            multiplier,
        };
        fault.validate()?;
        Ok(fault)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.combination.contains(self.slit) {
            return Err(Error::FaultSlitNotInCombination {
                combination: self.combination,
                slit: self.slit.label(),
            });
        }
        let (lo, hi) = FAULT_MULTIPLIER_RANGE;
        if !(lo..=hi).contains(&self.multiplier) {
            return Err(Error::OutOfModel(format!(
                "fault multiplier {} outside [{lo}, {hi}]",
                self.multiplier
            )));
        }
        Ok(())
    }
}

/// Applies each fault to its own (combination, slit) entry only.
pub fn apply_fault(
    table: &TransmittanceTable,
    faults: &[TransmittanceFault],
) -> Result<TransmittanceTable> {
    let mut out = *table;
    for f in faults {
        f.validate()?;
        let t = out.get(f.combination, f.slit) * f.multiplier;
        out.set(f.combination, f.slit, t);
    }
    Ok(out)
}

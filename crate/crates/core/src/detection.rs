//! Amplitude-to-probability maps.
//!
//! [`DetectionLaw::Born`] is the square law. [`DetectionLaw::PowerLaw`]
//! generalises the exponent so the κ pipeline can be checked against a
//! deliberately non-square response.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DetectionLaw {
    #[default]
    Born,
    /// `|ψ|^p`; `PowerLaw(2.0)` is the same map as `Born`.
    PowerLaw(f64),
}

impl DetectionLaw {
    pub fn power_law(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::OutOfModel(format!(
                "detection exponent must be positive, got {exponent}"
            )));
        }
        Ok(DetectionLaw::PowerLaw(exponent))
    }

    pub fn exponent(self) -> f64 {
        match self {
            DetectionLaw::Born => 2.0,
            DetectionLaw::PowerLaw(p) => p,
        }
    }

    pub fn is_square_law(self) -> bool {
        self.exponent() == 2.0
    }

    /// Unchecked evaluation for hot loops over amplitudes already known to
    /// be finite.
    #[inline]
    pub(crate) fn apply(self, amplitude: Complex64) -> f64 {
        let p = self.exponent();
        let n2 = amplitude.norm_sqr();
        if p == 2.0 {
            n2
        } else if p == 4.0 {
            n2 * n2
        } else {
            n2.powf(0.5 * p)
        }
    }
}

/// Detection probability `|amplitude|^p` under `law`.
pub fn detect(amplitude: Complex64, law: DetectionLaw) -> Result<f64> {
    if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
        return Err(Error::NonFinite(format!("amplitude {amplitude}")));
    }
    Ok(law.apply(amplitude))
}

impl fmt::Display for DetectionLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectionLaw::Born => f.write_str("born"),
            DetectionLaw::PowerLaw(p) => write!(f, "power:{p}"),
        }
    }
}

impl FromStr for DetectionLaw {
    type Err = Error;

    /// `born` or `power:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("born") {
            return Ok(DetectionLaw::Born);
        }
        let p = s.strip_prefix("power:").ok_or_else(|| {
            Error::config(
                "law",
                format!("expected \"born\" or \"power:<p>\", got {s:?}"),
            )
        })?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::config("law", format!("bad exponent in {s:?}")))?;
        DetectionLaw::power_law(p).map_err(|e| Error::config("law", e.to_string()))
    }
}

impl Serialize for DetectionLaw {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DetectionLaw {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

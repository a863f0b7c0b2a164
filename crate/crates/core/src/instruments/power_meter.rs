use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityForm {
    /// `P (1 + f P/FS)`
    #[default]
    Quadratic,
    /// `P (1 + f (P/FS)²)`
    Cubic,
}

/// Photodiode power meter with a fixed range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerMeterModel {
    /// Watts.
    pub full_scale: f64,
    /// Fractional response excess at full scale.
    pub nonlinearity_fraction: f64,
    pub form: NonlinearityForm,
    /// Additive Gaussian noise, watts.
    pub noise_sigma: f64,
}

impl Default for PowerMeterModel {
    fn default() -> Self {
        Self {
            full_scale: 1e-6,
            nonlinearity_fraction: 0.005,
            form: NonlinearityForm::Quadratic,
            noise_sigma: 0.0,
        }
    }
}

impl PowerMeterModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.full_scale.is_finite() && self.full_scale > 0.0) {
            return Err(Error::config("power_meter.full_scale", "must be > 0"));
        }
        if !(self.nonlinearity_fraction.is_finite() && self.nonlinearity_fraction >= 0.0) {
            return Err(Error::config(
                "power_meter.nonlinearity_fraction",
                "must be >= 0",
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::config("power_meter.noise_sigma", "must be >= 0"));
        }
        Ok(())
    }

    /// Deterministic part of the response.
    pub fn response(&self, true_power: f64) -> f64 {
        let u = true_power / self.full_scale;
        let excess = match self.form {
            NonlinearityForm::Quadratic => u,
            NonlinearityForm::Cubic => u * u,
        };
        true_power * (1.0 + self.nonlinearity_fraction * excess)
    }
}

/// One power reading. The display floors at zero, so noise cannot produce
/// a negative power.
pub fn power_meter_reading<R: Rng + ?Sized>(
    true_power: f64,
    model: &PowerMeterModel,
    rng: &mut R,
) -> Result<f64> {
    if !(true_power.is_finite() && (0.0..=model.full_scale).contains(&true_power)) {
        return Err(Error::OverRange {
            value: true_power,
            full_scale: model.full_scale,
        });
    }
    let mut reading = model.response(true_power);
    if model.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, model.noise_sigma).expect("sigma validated");
        reading += noise.sample(rng);
    }
    Ok(reading.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn quiet() -> PowerMeterModel {
        PowerMeterModel {
            full_scale: 2e-6,
            ..PowerMeterModel::default()
        }
    }

    #[test]
    fn examples() {
        let mut rng = stream(1, 0, 0);
        let m = quiet();
        assert_eq!(power_meter_reading(0.0, &m, &mut rng).unwrap(), 0.0);
        let fs = power_meter_reading(m.full_scale, &m, &mut rng).unwrap();
        assert!((fs / m.full_scale - 1.005).abs() < 1e-15);
    }

    #[test]
    fn over_range() {
        let mut rng = stream(1, 0, 0);
        let m = quiet();
        assert!(matches!(
            power_meter_reading(2.1e-6, &m, &mut rng),
            Err(Error::OverRange { .. })
        ));
        assert!(power_meter_reading(-1e-9, &m, &mut rng).is_err());
    }

    #[test]
    fn monotone_without_noise() {
        let mut rng = stream(1, 0, 0);
        for form in [NonlinearityForm::Quadratic, NonlinearityForm::Cubic] {
            let m = PowerMeterModel {
                form,
                nonlinearity_fraction: 0.3,
                ..quiet()
            };
            let mut last = -1.0;
            for i in 0..=1000 {
                let r =
                    power_meter_reading(m.full_scale * i as f64 / 1000.0, &m, &mut rng).unwrap();
                assert!(r >= last);
                last = r;
            }
        }
    }

    #[test]
    fn noise_is_reproducible() {
        let m = PowerMeterModel {
            noise_sigma: 1e-9,
            ..quiet()
        };
        let a = power_meter_reading(1e-6, &m, &mut stream(3, 0, 0)).unwrap();
        let b = power_meter_reading(1e-6, &m, &mut stream(3, 0, 0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, m.response(1e-6));
    }
}

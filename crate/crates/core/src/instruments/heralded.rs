use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pair source with a trigger detector that heralds each signal photon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeraldedSource {
    /// Pairs per second.
    pub pair_rate: f64,
    pub trigger_efficiency: f64,
    pub signal_efficiency: f64,
    pub trigger_quota: u64,
}

impl Default for HeraldedSource {
    fn default() -> Self {
        Self {
            pair_rate: 2e5,
            trigger_efficiency: 0.2,
            signal_efficiency: 0.3,
            trigger_quota: 30_000_000,
        }
    }
}

impl HeraldedSource {
    pub fn trigger_rate(&self) -> f64 {
        self.pair_rate * self.trigger_efficiency
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldedOutcome {
    pub triggers: u64,
    pub coincidences: u64,
    /// Seconds.
    pub elapsed: f64,
}

/// Counts heralded coincidences until the trigger count reaches the quota.
///
/// Trigger arrivals form a Poisson process, so the time to the quota-th
/// trigger is Gamma(quota, 1/trigger_rate), and each heralded photon is
/// counted independently with `signal_success_prob`, so the coincidences
/// are Binomial(quota, p). Both are sampled directly instead of stepping
/// through individual pairs.
pub fn heralded_measurement<R: Rng + ?Sized>(
    source: &HeraldedSource,
    signal_success_prob: f64,
    rng: &mut R,
) -> Result<HeraldedOutcome> {
    if !(0.0..=1.0).contains(&signal_success_prob) {
        return Err(Error::OutOfModel(format!(
            "signal success probability {signal_success_prob} outside [0, 1]"
        )));
    }
    if source.trigger_quota == 0 {
        return Err(Error::config("plan.trigger_quota", "must be >= 1"));
    }
    let rate = source.trigger_rate();
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::CannotTerminate);
    }
    let quota = source.trigger_quota;
    let coincidences = Binomial::new(quota, signal_success_prob)
        .expect("validated probability")
        .sample(rng);
    let elapsed = Gamma::new(quota as f64, 1.0 / rate)
        .expect("positive shape and scale")
        .sample(rng);
    Ok(HeraldedOutcome {
        triggers: quota,
        coincidences,
        elapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn small() -> HeraldedSource {
        HeraldedSource {
            trigger_quota: 10_000,
            ..HeraldedSource::default()
        }
    }

    #[test]
    fn zero_success_gives_no_coincidences() {
        let out = heralded_measurement(&small(), 0.0, &mut stream(1, 0, 0)).unwrap();
        assert_eq!(out.coincidences, 0);
        assert_eq!(out.triggers, 10_000);
    }

    #[test]
    fn quota_is_exact() {
        let mut rng = stream(2, 0, 0);
        for p in [0.0, 0.01, 0.5, 1.0] {
            let out = heralded_measurement(&small(), p, &mut rng).unwrap();
            assert_eq!(out.triggers, small().trigger_quota);
            assert!(out.coincidences <= out.triggers);
        }
    }

    #[test]
    fn cannot_terminate_without_triggers() {
        let dead = HeraldedSource {
            trigger_efficiency: 0.0,
            ..small()
        };
        assert_eq!(
            heralded_measurement(&dead, 0.1, &mut stream(1, 0, 0)),
            Err(Error::CannotTerminate)
        );
    }

    #[test]
    fn coincidence_mean_matches_binomial() {
        let src = small();
        let p = 0.03;
        let repeats = 400;
        let mut rng = stream(3, 0, 0);
        let mut total = 0u64;
        let mut elapsed = 0.0;
        for _ in 0..repeats {
            let out = heralded_measurement(&src, p, &mut rng).unwrap();
            total += out.coincidences;
            elapsed += out.elapsed;
        }
        let n = src.trigger_quota as f64;
        let mean = total as f64 / repeats as f64;
        let sigma_of_mean = (n * p * (1.0 - p) / repeats as f64).sqrt();
        assert!(
            (mean - n * p).abs() < 3.0 * sigma_of_mean,
            "{mean} vs {}",
            n * p
        );

        let expected_t = n / src.trigger_rate();
        let mean_t = elapsed / repeats as f64;
        assert!((mean_t / expected_t - 1.0).abs() < 3.0 / (n * repeats as f64).sqrt());
    }
}

//! Interference hierarchy arithmetic.
//!
//! Everything here is an inclusion-exclusion sum over subsets of open
//! paths. The second-order term of a pair, the third-order term ε of the
//! triple and the general N-path term all go through [`inclusion_exclusion`],
//! so `sorkin_term(3, ..)` and [`sorkin_epsilon`] agree bit for bit.
//!
//! The background (all-closed) measurement enters every term with the
//! inclusion-exclusion sign, i.e. pair terms are `P_ij - P_i - P_j + P_0`.

mod combination;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

pub use combination::{Slit, SlitCombination};

use crate::error::{Error, Result};

/// Relative floor below which δ is treated as zero.
pub const DEFAULT_DELTA_FLOOR_FRACTION: f64 = 1e-9;

/// The eight measured values for one run, indexed by [`SlitCombination`].
///
/// Entries are non-negative and finite, in any unit proportional to the
/// detection probability (counts, count rate, optical power).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 8]", into = "[f64; 8]")]
pub struct ProbabilityOctet([f64; 8]);

impl ProbabilityOctet {
    pub fn new(values: [f64; 8]) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            let c = SlitCombination::ALL[i];
            if !v.is_finite() {
                return Err(Error::InvalidOctet(format!("P_{c} = {v} is not finite")));
            }
            if *v < 0.0 {
                return Err(Error::InvalidOctet(format!("P_{c} = {v} is negative")));
            }
        }
        Ok(Self(values))
    }

    pub fn from_fn(mut f: impl FnMut(SlitCombination) -> f64) -> Result<Self> {
        Self::new(SlitCombination::ALL.map(&mut f))
    }

    pub fn zeros() -> Self {
        Self([0.0; 8])
    }

    pub fn values(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn get(&self, c: SlitCombination) -> f64 {
        self.0[c.index()]
    }

    pub fn background(&self) -> f64 {
        self.0[0]
    }

    pub fn max_value(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every entry by `factor`, which must be positive and finite.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidOctet(format!(
                "scale factor {factor} must be > 0"
            )));
        }
        Self::new(self.0.map(|v| v * factor))
    }

    /// δ floor used when the caller does not supply one.
    pub fn default_delta_floor(&self) -> f64 {
        DEFAULT_DELTA_FLOOR_FRACTION * self.max_value()
    }
}

impl TryFrom<[f64; 8]> for ProbabilityOctet {
    type Error = Error;

    fn try_from(v: [f64; 8]) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilityOctet> for [f64; 8] {
    fn from(o: ProbabilityOctet) -> Self {
        o.0
    }
}

impl Index<SlitCombination> for ProbabilityOctet {
    type Output = f64;

    fn index(&self, c: SlitCombination) -> &f64 {
        &self.0[c.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimationMethod {
    StandardVariance,
    AllanVariance,
    Propagated,
}

impl fmt::Display for EstimationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimationMethod::StandardVariance => "standard-variance",
            EstimationMethod::AllanVariance => "allan-variance",
            EstimationMethod::Propagated => "propagated",
        })
    }
}

/// κ with an uncertainty and a record of how the uncertainty was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub kappa: f64,
    pub sigma: f64,
    pub method: EstimationMethod,
    pub n_runs: usize,
}

impl KappaEstimate {
    pub fn new(kappa: f64, sigma: f64, method: EstimationMethod, n_runs: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::NonFinite(format!("kappa sigma {sigma}")));
        }
        if n_runs == 0 {
            return Err(Error::SeriesTooShort { needed: 1, got: 0 });
        }
        Ok(Self {
            kappa,
            sigma,
            method,
            n_runs,
        })
    }
}

/// Signed inclusion-exclusion sum over all subsets of an `order`-path set:
/// `sum_S (-1)^(order - |S|) P_S`, with subsets visited from the full set
/// down to the empty set.
pub fn inclusion_exclusion(order: usize, mut value: impl FnMut(usize) -> f64) -> f64 {
    let full = (1usize << order) - 1;
    let mut acc = 0.0;
    for mask in (0..=full).rev() {
        let v = value(mask);
        if (order - mask.count_ones() as usize).is_multiple_of(2) {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc
}

/// Background-corrected two-path term `P_ij - P_i - P_j + P_0`.
pub fn pairwise_interference(octet: &ProbabilityOctet, pair: SlitCombination) -> Result<f64> {
    if pair.len() != 2 {
        return Err(Error::WrongCardinality {
            expected: 2,
            got: pair,
        });
    }
    let slits: Vec<Slit> = pair.slits().collect();
    Ok(inclusion_exclusion(2, |local| {
        let mut bits = 0u8;
        for (k, s) in slits.iter().enumerate() {
            if local & (1 << k) != 0 {
                bits |= s.bit();
            }
        }
        octet.get(SlitCombination::from_bits(bits).expect("subset of a pair"))
    }))
}

/// ε = P_ABC − P_AB − P_AC − P_BC + P_A + P_B + P_C − P_0.
pub fn sorkin_epsilon(octet: &ProbabilityOctet) -> f64 {
    inclusion_exclusion(3, |mask| octet.values()[mask])
}

/// δ = |I_AB| + |I_BC| + |I_CA|.
pub fn sorkin_delta(octet: &ProbabilityOctet) -> f64 {
    SlitCombination::PAIRS
        .iter()
        .map(|&p| {
            pairwise_interference(octet, p)
                .expect("pairs have two members")
                .abs()
        })
        .sum()
}

/// κ = ε/δ, rejecting data whose δ does not exceed `delta_floor`.
pub fn kappa(octet: &ProbabilityOctet, delta_floor: f64) -> Result<f64> {
    let delta = sorkin_delta(octet);
    if delta <= delta_floor {
        return Err(Error::Degenerate {
            delta,
            floor: delta_floor,
        });
    }
    Ok(sorkin_epsilon(octet) / delta)
}

/// [`kappa`] with the floor at `1e-9` of the largest octet entry.
pub fn kappa_default(octet: &ProbabilityOctet) -> Result<f64> {
    kappa(octet, octet.default_delta_floor())
}

/// The `order`-th term of the interference hierarchy.
///
/// `probabilities` maps each subset bitmask of `{0, .., order-1}` to its
/// measured value; all `2^order` subsets, including the empty one, must be
/// present.
pub fn sorkin_term(order: usize, probabilities: &BTreeMap<usize, f64>) -> Result<f64> {
    if order == 0 || order >= usize::BITS as usize {
        return Err(Error::OutOfModel(format!("hierarchy order {order}")));
    }
    for mask in 0..(1usize << order) {
        match probabilities.get(&mask) {
            Some(v) if v.is_finite() => {}
            Some(v) => return Err(Error::NonFinite(format!("P[{mask:#b}] = {v}"))),
            None => {
                return Err(Error::MissingSubset {
                    order,
                    subset: mask,
                })
            }
        }
    }
    Ok(inclusion_exclusion(order, |mask| probabilities[&mask]))
}

/// Subset map of an octet, for use with [`sorkin_term`].
pub fn octet_subset_map(octet: &ProbabilityOctet) -> BTreeMap<usize, f64> {
    octet.values().iter().copied().enumerate().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn toy(single: f64, pair: f64, triple: f64) -> ProbabilityOctet {
        ProbabilityOctet::from_fn(|c| match c.len() {
            0 => 0.0,
            1 => single,
            2 => pair,
            _ => triple,
        })
        .unwrap()
    }

    fn square_law() -> ProbabilityOctet {
        toy(1.0, 4.0, 9.0)
    }

    fn quartic_law() -> ProbabilityOctet {
        toy(1.0, 16.0, 81.0)
    }

    #[test]
    fn octet_validation() {
        assert!(ProbabilityOctet::new([0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1e-3]).is_err());
        assert!(ProbabilityOctet::new([f64::NAN; 8]).is_err());
        assert!(ProbabilityOctet::new([f64::INFINITY, 0., 0., 0., 0., 0., 0., 0.]).is_err());
        assert!(square_law().scaled(0.0).is_err());
    }

    #[test]
    fn pairwise_examples() {
        let z = ProbabilityOctet::zeros();
        assert_eq!(pairwise_interference(&z, SlitCombination::AB).unwrap(), 0.0);
        assert_eq!(
            pairwise_interference(&square_law(), SlitCombination::AB).unwrap(),
            2.0
        );
        assert_eq!(
            pairwise_interference(&quartic_law(), SlitCombination::AB).unwrap(),
            14.0
        );
    }

    #[test]
    fn pairwise_rejects_wrong_cardinality() {
        for c in [
            SlitCombination::EMPTY,
            SlitCombination::A,
            SlitCombination::ABC,
        ] {
            assert!(matches!(
                pairwise_interference(&square_law(), c),
                Err(Error::WrongCardinality { expected: 2, .. })
            ));
        }
    }

    #[test]
    fn pairwise_includes_background() {
        let mut v = *square_law().values();
        v[0] = 0.5;
        let o = ProbabilityOctet::new(v).unwrap();
        assert_eq!(pairwise_interference(&o, SlitCombination::BC).unwrap(), 2.5);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(sorkin_epsilon(&ProbabilityOctet::zeros()), 0.0);
        assert_eq!(sorkin_epsilon(&square_law()), 0.0);
        assert_eq!(sorkin_epsilon(&quartic_law()), 36.0);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(sorkin_delta(&ProbabilityOctet::zeros()), 0.0);
        assert_eq!(sorkin_delta(&square_law()), 6.0);
        assert_eq!(sorkin_delta(&quartic_law()), 42.0);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_default(&square_law()).unwrap(), 0.0);
        let k = kappa_default(&quartic_law()).unwrap();
        assert!((k - 6.0 / 7.0).abs() < 1e-15);
        assert!(matches!(
            kappa_default(&ProbabilityOctet::zeros()),
            Err(Error::Degenerate { .. })
        ));
        // classical data: every pair term is zero
        let classical = toy(1.0, 2.0, 3.0);
        assert!(kappa_default(&classical).unwrap_err().is_degenerate());
    }

    #[test]
    fn sorkin_term_matches_named_terms_exactly() {
        let o = ProbabilityOctet::new([0.3, 1.1, 0.7, 2.9, 1.3, 3.7, 1.9, 6.1]).unwrap();
        let map = octet_subset_map(&o);
        assert_eq!(
            sorkin_term(3, &map).unwrap().to_bits(),
            sorkin_epsilon(&o).to_bits()
        );

        // restriction to {A, B} in local bit order
        let ab: BTreeMap<usize, f64> = [
            (0, o[SlitCombination::EMPTY]),
            (1, o[SlitCombination::A]),
            (2, o[SlitCombination::B]),
            (3, o[SlitCombination::AB]),
        ]
        .into_iter()
        .collect();
        assert_eq!(
            sorkin_term(2, &ab).unwrap().to_bits(),
            pairwise_interference(&o, SlitCombination::AB)
                .unwrap()
                .to_bits()
        );
    }

    #[test]
    fn sorkin_term_missing_subset() {
        let mut map = octet_subset_map(&square_law());
        map.remove(&5);
        assert_eq!(
            sorkin_term(3, &map),
            Err(Error::MissingSubset {
                order: 3,
                subset: 5
            })
        );
        assert!(sorkin_term(0, &map).is_err());
    }

    #[test]
    fn sorkin_term_first_order() {
        let map: BTreeMap<usize, f64> = [(0, 0.25), (1, 2.0)].into_iter().collect();
        assert_eq!(sorkin_term(1, &map).unwrap(), 1.75);
    }

    fn square_law_subsets(amps: &[Complex64], background: f64) -> BTreeMap<usize, f64> {
        (0..1usize << amps.len())
            .map(|mask| {
                let psi: Complex64 = amps
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, a)| *a)
                    .sum();
                (mask, psi.norm_sqr() + background)
            })
            .collect()
    }

    #[test]
    fn fourth_order_vanishes_for_square_law() {
        let amps = [
            Complex64::new(0.3, -1.2),
            Complex64::new(-0.8, 0.1),
            Complex64::new(1.5, 0.4),
            Complex64::new(0.05, 0.9),
        ];
        let map = square_law_subsets(&amps, 0.0);
        let scale = map.values().copied().fold(0.0, f64::max);
        assert!(sorkin_term(4, &map).unwrap().abs() <= 1e-12 * scale);
    }

    fn amplitude() -> impl Strategy<Value = Complex64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| Complex64::new(re, im))
    }

    proptest! {
        #[test]
        fn square_law_nulls_epsilon(a in amplitude(), b in amplitude(), c in amplitude(), bg in 0.0..5.0f64) {
            let map = square_law_subsets(&[a, b, c], bg);
            let o = ProbabilityOctet::new(std::array::from_fn(|i| map[&i])).unwrap();
            let scale = o.max_value().max(1.0);
            prop_assert!(sorkin_epsilon(&o).abs() <= 1e-13 * scale);
        }

        #[test]
        fn hierarchy_vanishes_above_second_order(amps in prop::collection::vec(amplitude(), 3..=5)) {
            let map = square_law_subsets(&amps, 0.0);
            let scale = map.values().copied().fold(0.0, f64::max).max(1e-300);
            let term = sorkin_term(amps.len(), &map).unwrap();
            prop_assert!(term.abs() <= 1e-12 * scale, "term {term} scale {scale}");
        }

        #[test]
        fn kappa_invariant_under_dyadic_scaling(
            v in prop::array::uniform8(0.0..100.0f64),
            exp in -40i32..40,
        ) {
            let o = ProbabilityOctet::new(v).unwrap();
            let c = 2f64.powi(exp);
            let s = o.scaled(c).unwrap();
            match (kappa_default(&o), kappa_default(&s)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
            }
        }

        #[test]
        fn delta_non_negative_and_epsilon_linear(
            x in prop::array::uniform8(0.0..10.0f64),
            y in prop::array::uniform8(0.0..10.0f64),
        ) {
            let ox = ProbabilityOctet::new(x).unwrap();
            let oy = ProbabilityOctet::new(y).unwrap();
            let oxy = ProbabilityOctet::new(std::array::from_fn(|i| x[i] + y[i])).unwrap();
            prop_assert!(sorkin_delta(&ox) >= 0.0);
            let lhs = sorkin_epsilon(&oxy);
            let rhs = sorkin_epsilon(&ox) + sorkin_epsilon(&oy);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + oxy.max_value()));
        }
    }
}

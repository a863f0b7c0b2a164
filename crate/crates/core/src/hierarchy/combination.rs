use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One of the three slits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slit {
    A,
    B,
    C,
}

impl Slit {
    pub const ALL: [Slit; 3] = [Slit::A, Slit::B, Slit::C];

    pub fn index(self) -> usize {
        match self {
            Slit::A => 0,
            Slit::B => 1,
            Slit::C => 2,
        }
    }

    pub fn bit(self) -> u8 {
        1 << self.index()
    }

    pub fn label(self) -> char {
        match self {
            Slit::A => 'A',
            Slit::B => 'B',
            Slit::C => 'C',
        }
    }
}

impl fmt::Display for Slit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Slit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "A" => Ok(Slit::A),
            "B" => Ok(Slit::B),
            "C" => Ok(Slit::C),
            other => Err(Error::InvalidOctet(format!("unknown slit label {other:?}"))),
        }
    }
}

impl Serialize for Slit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subset of {A, B, C}, stored as a bitmask with A = 1, B = 2, C = 4.
///
/// The bitmask value is also the canonical index of the combination, so
/// `SlitCombination::ALL[s.index()] == s`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlitCombination(u8);

impl SlitCombination {
    pub const EMPTY: Self = Self(0);
    pub const A: Self = Self(1);
    pub const B: Self = Self(2);
    pub const AB: Self = Self(3);
    pub const C: Self = Self(4);
    pub const AC: Self = Self(5);
    pub const BC: Self = Self(6);
    pub const ABC: Self = Self(7);

    /// All eight combinations in canonical (bitmask) order.
    pub const ALL: [Self; 8] = [
        Self::EMPTY,
        Self::A,
        Self::B,
        Self::AB,
        Self::C,
        Self::AC,
        Self::BC,
        Self::ABC,
    ];

    pub const PAIRS: [Self; 3] = [Self::AB, Self::BC, Self::AC];

    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 8).then_some(Self(bits))
    }

    pub fn from_slits(slits: &[Slit]) -> Self {
        Self(slits.iter().fold(0, |acc, s| acc | s.bit()))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, slit: Slit) -> bool {
        self.0 & slit.bit() != 0
    }

    pub fn slits(self) -> impl Iterator<Item = Slit> {
        Slit::ALL.into_iter().filter(move |s| self.contains(*s))
    }

    pub fn label(self) -> String {
        if self.is_empty() {
            "0".to_string()
        } else {
            self.slits().map(Slit::label).collect()
        }
    }
}

impl fmt::Display for SlitCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Debug for SlitCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SlitCombination({})", self.label())
    }
}

impl FromStr for SlitCombination {
    type Err = Error;

    /// Accepts `0` for the empty set, otherwise a string of distinct slit
    /// labels in any order (`BC` and `CB` are the same combination).
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::EMPTY);
        }
        if s.is_empty() {
            return Err(Error::InvalidOctet("empty combination label".into()));
        }
        let mut bits = 0u8;
        for ch in s.chars() {
            let slit: Slit = ch.to_string().parse()?;
            if bits & slit.bit() != 0 {
                return Err(Error::InvalidOctet(format!("repeated slit in {s:?}")));
            }
            bits |= slit.bit();
        }
        Ok(Self(bits))
    }
}

impl Serialize for SlitCombination {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlitCombination {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_bitmask_order() {
        for (i, c) in SlitCombination::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
        let labels: Vec<_> = SlitCombination::ALL.iter().map(|c| c.label()).collect();
        assert_eq!(labels, ["0", "A", "B", "AB", "C", "AC", "BC", "ABC"]);
    }

    #[test]
    fn labels_round_trip() {
        for c in SlitCombination::ALL {
            assert_eq!(c.label().parse::<SlitCombination>().unwrap(), c);
        }
        assert_eq!(
            "CB".parse::<SlitCombination>().unwrap(),
            SlitCombination::BC
        );
    }

    #[test]
    fn rejects_bad_labels() {
        assert!("".parse::<SlitCombination>().is_err());
        assert!("AA".parse::<SlitCombination>().is_err());
        assert!("D".parse::<SlitCombination>().is_err());
        assert!(SlitCombination::from_bits(8).is_none());
    }
}

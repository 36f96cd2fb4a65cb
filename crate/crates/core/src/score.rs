//! Similarity scores kept in exact decimal-tenth arithmetic.
//!
//! Every scoring weight in the pipeline is a multiple of 0.1, and the
//! clustering rule is a strict `> 0.8` comparison. Floating point sums like
//! `0.4 + 0.2 + 0.2` land on `0.8000000000000001` and would cluster pairs
//! that sit exactly on the threshold, so scores are stored as integer tenths
//! and thresholds as integer hundredths.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("threshold {0} is outside [0, 1]")]
    ThresholdRange(f64),
    #[error("{0} is not a decimal-tenth score")]
    OffLattice(f64),
}

/// A similarity score expressed in integer tenths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(u8);

impl Score {
    pub const ZERO: Score = Score(0);

    pub const fn from_tenths(tenths: u8) -> Score {
        Score(tenths)
    }

    /// Accepts an `f64` that sits (within rounding error) on the tenth lattice.
    pub fn from_value(value: f64) -> Result<Score, ScoreError> {
        let tenths = (value * 10.0).round();
        if !(0.0..=25.5).contains(&tenths) || (value * 10.0 - tenths).abs() > 1e-6 {
            return Err(ScoreError::OffLattice(value));
        }
        Ok(Score(tenths as u8))
    }

    pub const fn tenths(self) -> u8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 10.0
    }
}

impl Add for Score {
    type Output = Score;

    fn add(self, rhs: Score) -> Score {
        Score(self.0 + rhs.0)
    }
}

impl Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        iter.fold(Score::ZERO, Add::add)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1}", self.value())
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Score, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Score::from_value(value).map_err(de::Error::custom)
    }
}

/// A clustering threshold in integer hundredths of a score point.
///
/// `admits` implements the strict `>` rule: a score equal to the threshold
/// does not pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Threshold(u8);

impl Threshold {
    pub const DEFAULT: Threshold = Threshold(80);

    pub fn from_value(value: f64) -> Result<Threshold, ScoreError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(ScoreError::ThresholdRange(value));
        }
        Ok(Threshold((value * 100.0).round() as u8))
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 100.0
    }

    /// Strictly-greater admission test, exact for tenth-valued scores.
    pub fn admits(self, score: Score) -> bool {
        u16::from(score.tenths()) * 10 > u16::from(self.0)
    }
}

impl Default for Threshold {
    fn default() -> Threshold {
        Threshold::DEFAULT
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Threshold, String> {
        let value: f64 = s.parse().map_err(|_| format!("invalid threshold `{s}`"))?;
        Threshold::from_value(value).map_err(|e| e.to_string())
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Threshold, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Threshold::from_value(value).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_are_exact_on_the_tenth_lattice() {
        let total = Score::from_tenths(5) + Score::from_tenths(2) + Score::from_tenths(2);
        assert_eq!(total, Score::from_tenths(9));
        assert_eq!(total.to_string(), "0.9");
    }

    #[test]
    fn threshold_comparison_is_strict() {
        let t = Threshold::DEFAULT;
        assert!(!t.admits(Score::from_tenths(8)), "0.8 must not exceed 0.8");
        assert!(t.admits(Score::from_tenths(9)));
        assert!(!t.admits(Score::from_tenths(0)));
    }

    #[test]
    fn tenth_sums_avoid_float_drift() {
        // The float trap this module exists for: 0.5 + 0.2 + 0.2 as f64 is
        // not 0.9, so naive float sums drift off the decimal lattice.
        assert_ne!(0.5_f64 + 0.2 + 0.2, 0.9);
        let total = Score::from_tenths(5) + Score::from_tenths(2) + Score::from_tenths(2);
        assert_eq!(total.value(), 0.9);
        let boundary = Score::from_tenths(4) + Score::from_tenths(2) + Score::from_tenths(2);
        assert!(!Threshold::DEFAULT.admits(boundary));
    }

    #[test]
    fn threshold_range_is_validated() {
        assert!(Threshold::from_value(1.2).is_err());
        assert!(Threshold::from_value(-0.1).is_err());
        assert_eq!(Threshold::from_value(0.85).unwrap().value(), 0.85);
    }

    #[test]
    fn score_from_value_rejects_off_lattice() {
        assert!(Score::from_value(0.85).is_err());
        assert_eq!(Score::from_value(0.9).unwrap(), Score::from_tenths(9));
        assert_eq!(Score::from_value(1.1).unwrap(), Score::from_tenths(11));
    }
}

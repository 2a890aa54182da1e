//! Extended-real utility values with an explicit "impossible" marker.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A utility outcome: `Null` for impossible or unacceptable profiles,
/// otherwise a point on the extended real line.
///
/// `Null` never takes part in ordering. `Finite` never holds a NaN or an
/// infinity; use [`UtilityValue::from_f64`] to normalize raw floats.
#[derive(Debug, Clone, Copy, Default)]
pub enum UtilityValue {
    #[default]
    Null,
    NegInf,
    Finite(f64),
    PosInf,
}

impl UtilityValue {
    /// Maps NaN to `Null` and the IEEE infinities to their variants.
    pub fn from_f64(x: f64) -> Self {
        if x.is_nan() {
            UtilityValue::Null
        } else if x == f64::INFINITY {
            UtilityValue::PosInf
        } else if x == f64::NEG_INFINITY {
            UtilityValue::NegInf
        } else {
            UtilityValue::Finite(x)
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, UtilityValue::Null)
    }

    /// The value as an IEEE double, `None` for `Null`. The mapping is
    /// order-preserving, so comparisons can go through it.
    pub fn to_f64(&self) -> Option<f64> {
        match *self {
            UtilityValue::Null => None,
            UtilityValue::NegInf => Some(f64::NEG_INFINITY),
            UtilityValue::Finite(x) => Some(x),
            UtilityValue::PosInf => Some(f64::INFINITY),
        }
    }

    /// Total order on non-`Null` values; `None` if either side is `Null`.
    pub fn compare(&self, other: &Self) -> Option<Ordering> {
        Some(self.to_f64()?.total_cmp(&other.to_f64()?))
    }

    /// Orders `Null` below `NegInf`. Used where a missing payoff must lose
    /// every strict comparison, e.g. unilateral deviations to impossible
    /// profiles.
    pub fn cmp_null_lowest(&self, other: &Self) -> Ordering {
        match (self.to_f64(), other.to_f64()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.total_cmp(&b),
        }
    }

    /// Extended-real product. `Null` is absorbing, `0 × ±∞ = 0`, otherwise
    /// the usual sign rules.
    pub fn product(self, other: Self) -> Self {
        match (self.to_f64(), other.to_f64()) {
            (Some(a), Some(b)) => {
                if a == 0.0 || b == 0.0 {
                    UtilityValue::Finite(0.0)
                } else {
                    UtilityValue::from_f64(a * b)
                }
            }
            _ => UtilityValue::Null,
        }
    }

    /// Extended-real sum. `Null` is absorbing and `+∞ + −∞` resolves to `−∞`.
    pub fn sum(self, other: Self) -> Self {
        match (self, other) {
            (UtilityValue::Null, _) | (_, UtilityValue::Null) => UtilityValue::Null,
            (UtilityValue::NegInf, _) | (_, UtilityValue::NegInf) => UtilityValue::NegInf,
            (UtilityValue::PosInf, _) | (_, UtilityValue::PosInf) => UtilityValue::PosInf,
            (UtilityValue::Finite(a), UtilityValue::Finite(b)) => UtilityValue::from_f64(a + b),
        }
    }

    /// Multiplies a finite value by `factor`; other variants pass through.
    pub fn scale(self, factor: f64) -> Self {
        match self {
            UtilityValue::Finite(x) => UtilityValue::from_f64(x * factor),
            other => other,
        }
    }
}

impl PartialEq for UtilityValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (UtilityValue::Null, UtilityValue::Null) => true,
            (UtilityValue::NegInf, UtilityValue::NegInf) => true,
            (UtilityValue::PosInf, UtilityValue::PosInf) => true,
            (UtilityValue::Finite(a), UtilityValue::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialOrd for UtilityValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other)
    }
}

impl From<f64> for UtilityValue {
    fn from(x: f64) -> Self {
        UtilityValue::from_f64(x)
    }
}

impl fmt::Display for UtilityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilityValue::Null => f.write_str("null"),
            UtilityValue::NegInf => f.write_str("-inf"),
            UtilityValue::PosInf => f.write_str("+inf"),
            UtilityValue::Finite(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid utility value {0:?}: expected a number, \"-inf\", \"+inf\" or null")]
pub struct ParseValueError(pub String);

impl FromStr for UtilityValue {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "null" => Ok(UtilityValue::Null),
            "-inf" => Ok(UtilityValue::NegInf),
            "+inf" => Ok(UtilityValue::PosInf),
            _ => match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(UtilityValue::Finite(x)),
                _ => Err(ParseValueError(s.to_string())),
            },
        }
    }
}

impl Serialize for UtilityValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            UtilityValue::Null => serializer.serialize_unit(),
            UtilityValue::NegInf => serializer.serialize_str("-inf"),
            UtilityValue::PosInf => serializer.serialize_str("+inf"),
            UtilityValue::Finite(x) => serializer.serialize_f64(x),
        }
    }
}

struct ValueVisitor;

impl<'de> Visitor<'de> for ValueVisitor {
    type Value = UtilityValue;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number, \"-inf\", \"+inf\" or null")
    }

    fn visit_unit<E: de::Error>(self) -> Result<UtilityValue, E> {
        Ok(UtilityValue::Null)
    }

    fn visit_none<E: de::Error>(self) -> Result<UtilityValue, E> {
        Ok(UtilityValue::Null)
    }

    fn visit_some<D: Deserializer<'de>>(self, d: D) -> Result<UtilityValue, D::Error> {
        d.deserialize_any(self)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<UtilityValue, E> {
        if v.is_finite() {
            Ok(UtilityValue::Finite(v))
        } else {
            Err(E::custom(
                "non-finite numbers must be written as \"-inf\" or \"+inf\"",
            ))
        }
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<UtilityValue, E> {
        Ok(UtilityValue::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<UtilityValue, E> {
        Ok(UtilityValue::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<UtilityValue, E> {
        match v {
            "-inf" => Ok(UtilityValue::NegInf),
            "+inf" => Ok(UtilityValue::PosInf),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for UtilityValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ValueVisitor)
    }
}

//! Domain types: background gas, wave modes, scalar profiles, scenarios
//! and pointwise field samples.

mod gas;
mod mode;
mod profile;
mod scenario;

use std::fmt;
use std::ops::Add;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

pub use gas::GasParameters;
pub use mode::{Branch, WaveMode};
pub(crate) use profile::signed_log_sum;
pub use profile::{ExpTerm, Profile};
pub use scenario::{characteristic_speeds, Forcing, Scenario};

/// Value of [`Profile::value`] at `xi`.
pub fn eval_profile(p: &Profile, xi: f64) -> f64 {
    p.value(xi)
}

/// Value of [`Profile::sup`].
pub fn profile_sup(p: &Profile) -> Extended {
    p.sup()
}

/// A real number or one of the two infinities.
///
/// Serialized as a JSON number, or as the strings `"+inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    PosInf,
    NegInf,
}

impl Extended {
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            Extended::PosInf
        } else if v == f64::NEG_INFINITY {
            Extended::NegInf
        } else {
            Extended::Finite(v)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::PosInf => f64::INFINITY,
            Extended::NegInf => f64::NEG_INFINITY,
        }
    }

    pub fn is_pos_inf(self) -> bool {
        self == Extended::PosInf
    }

    /// Multiplication by a non-negative factor.
    pub fn scale(self, factor: f64) -> Self {
        match self {
            Extended::Finite(v) => Extended::Finite(v * factor),
            inf if factor > 0.0 => inf,
            _ => Extended::Finite(0.0),
        }
    }
}

impl Add for Extended {
    type Output = Extended;

    fn add(self, rhs: Extended) -> Extended {
        Extended::from_f64(self.to_f64() + rhs.to_f64())
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => f.write_str("+inf"),
            Extended::NegInf => f.write_str("-inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::PosInf => s.serialize_str("+inf"),
            Extended::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtendedVisitor;

        impl Visitor<'_> for ExtendedVisitor {
            type Value = Extended;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number, \"+inf\" or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Extended, E> {
                Ok(Extended::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Extended, E> {
                Ok(Extended::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Extended, E> {
                Ok(Extended::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Extended, E> {
                match v {
                    "+inf" | "inf" => Ok(Extended::PosInf),
                    "-inf" => Ok(Extended::NegInf),
                    other => Err(E::custom(format!("unexpected string {other:?}"))),
                }
            }
        }

        d.deserialize_any(ExtendedVisitor)
    }
}

/// Where a profile can be non-zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    Empty,
    Interval { lo: f64, hi: f64 },
    Unbounded,
}

impl Support {
    /// Smallest support containing both.
    pub fn hull(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Empty, s) | (s, Support::Empty) => *s,
            (Support::Unbounded, _) | (_, Support::Unbounded) => Support::Unbounded,
            (Support::Interval { lo: a, hi: b }, Support::Interval { lo: c, hi: d }) => {
                Support::Interval { lo: a.min(*c), hi: b.max(*d) }
            }
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, Support::Unbounded)
    }
}

/// `(v'_x, v'_y, v'_z, p')` at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldSample {
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl FieldSample {
    pub fn zero_at(x: f64, y: f64, z: f64, t: f64) -> Self {
        FieldSample { x, y, z, t, ..Default::default() }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.vx, self.vy, self.vz, self.p]
    }

    pub fn with_components(mut self, c: [f64; 4]) -> Self {
        [self.vx, self.vy, self.vz, self.p] = c;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_json() {
        assert_eq!(serde_json::to_string(&Extended::PosInf).unwrap(), "\"+inf\"");
        assert_eq!(serde_json::to_string(&Extended::Finite(1.5)).unwrap(), "1.5");
        let v: Extended = serde_json::from_str("\"-inf\"").unwrap();
        assert_eq!(v, Extended::NegInf);
        let v: Extended = serde_json::from_str("2").unwrap();
        assert_eq!(v, Extended::Finite(2.0));
    }

    #[test]
    fn extended_arithmetic() {
        assert_eq!(Extended::Finite(1.0) + Extended::PosInf, Extended::PosInf);
        assert_eq!(Extended::PosInf.scale(0.0), Extended::Finite(0.0));
        assert_eq!(Extended::Finite(2.0).scale(3.0), Extended::Finite(6.0));
    }

    #[test]
    fn support_hull() {
        let a = Support::Interval { lo: -1.0, hi: 1.0 };
        let b = Support::Interval { lo: 0.0, hi: 3.0 };
        assert_eq!(a.hull(&b), Support::Interval { lo: -1.0, hi: 3.0 });
        assert_eq!(a.hull(&Support::Empty), a);
        assert_eq!(a.hull(&Support::Unbounded), Support::Unbounded);
    }
}

//! Exact scalars.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator. The helpers here fix the
//! textual encoding used by the JSON formats: `"p/q"`, or `"p"` for integers.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `p/q` as an exact rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::ParseRational(s.to_string()))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::ParseRational(s.to_string()))?;
        if q.is_zero() {
            return Err(Error::ParseRational(s.to_string()));
        }
        Ok(Rational::new(p, q))
    } else {
        BigInt::from_str(t)
            .map(Rational::from_integer)
            .map_err(|_| Error::ParseRational(s.to_string()))
    }
}

/// Lowest-terms rendering; `Ratio`'s `Display` already omits a unit denominator.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Largest absolute value in a sequence, zero when empty.
pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
}

pub mod serde_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        Ok(RationalLiteral::deserialize(d)?.0)
    }
}

pub mod serde_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        Ok(Vec::<RationalLiteral>::deserialize(d)?
            .into_iter()
            .map(|r| r.0)
            .collect())
    }
}

/// Accepts `"p/q"` strings and, for hand-written inputs, bare JSON integers.
/// Parsing happens inside the deserializer so errors carry the element's path.
pub(crate) struct RationalLiteral(pub(crate) Rational);

impl<'de> Deserialize<'de> for RationalLiteral {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = RationalLiteral;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a rational literal \"p/q\" or an integer")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<RationalLiteral, E> {
                parse_rational(s).map(RationalLiteral).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, i: i64) -> std::result::Result<RationalLiteral, E> {
                Ok(RationalLiteral(int(i)))
            }

            fn visit_u64<E: de::Error>(self, u: u64) -> std::result::Result<RationalLiteral, E> {
                Ok(RationalLiteral(Rational::from_integer(u.into())))
            }
        }
        d.deserialize_any(V)
    }
}

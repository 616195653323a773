//! Exact rational arithmetic helpers.
//!
//! Every theorem parameter (the exponent triples, the space exponents,
//! the weights) is a rational end to end; floating point enters only when
//! a kernel or a sampler needs a concrete number. The wire format for a
//! rational is the string `"num/den"` (or `"num"` for integers); floating
//! literals are rejected on parse because the boundedness conditions are
//! exact equalities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::str::FromStr;
use thiserror::Error;

/// Exact rational scalar used for all theorem parameters.
pub type Rat = BigRational;

/// `n/d` as an exact rational.
///
/// Panics when `d == 0`; only used with literal denominators.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn rint(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Lossy conversion for kernel evaluation and sampling.
pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational magnitude exceeds f64 range")
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid rational {input:?}: {reason}")]
pub struct RatParseError {
    pub input: String,
    pub reason: String,
}

/// Parses `"num/den"` or `"num"`. Rejects floating literals, empty
/// components, and zero denominators.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let err = |reason: &str| RatParseError {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty string"));
    }
    let (num_str, den_str) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let numer = BigInt::from_str(num_str)
        .map_err(|_| err("numerator is not an integer (floats are not accepted)"))?;
    let denom = match den_str {
        Some(d) => BigInt::from_str(d)
            .map_err(|_| err("denominator is not an integer (floats are not accepted)"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(numer, denom))
}

/// Canonical wire form: `"num"` for integers, `"num/den"` otherwise.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
///
/// `None` when `p == 1` (the conjugate is infinite) or `p < 1`.
pub fn hoelder_conjugate(p: &Rat) -> Option<Rat> {
    if *p <= Rat::one() {
        return None;
    }
    Some(p / (p - Rat::one()))
}

/// Half-integer gamma values: `Γ(k/2)` for `k >= 1`.
///
/// Exact recursion from `Γ(1/2) = √π` and `Γ(1) = 1`; used for the
/// normalizing constants of spherically symmetric proposal densities.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half wants a positive half-integer index");
    let mut value = if k % 2 == 1 {
        std::f64::consts::PI.sqrt()
    } else {
        1.0
    };
    let mut arg = if k % 2 == 1 { 0.5 } else { 1.0 };
    while arg + 1.0 <= k as f64 / 2.0 + 1e-9 {
        value *= arg;
        arg += 1.0;
    }
    value
}

/// Serde adapter for a single `Rat` field: string `"num/den"` on the wire.
pub mod serde_rat {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter for `Option<Rat>` fields.
pub mod serde_opt_rat {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Rat>, ser: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(format_rat).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Rat>, D::Error> {
        let raw = Option::<String>::deserialize(de)?;
        raw.as_deref()
            .map(|s| parse_rat(s).map_err(de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for `[Rat; 2]` fields.
pub mod serde_rat_pair {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &[Rat; 2], ser: S) -> Result<S::Ok, S::Error> {
        [format_rat(&x[0]), format_rat(&x[1])].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<[Rat; 2], D::Error> {
        let raw = <[String; 2]>::deserialize(de)?;
        Ok([
            parse_rat(&raw[0]).map_err(de::Error::custom)?,
            parse_rat(&raw[1]).map_err(de::Error::custom)?,
        ])
    }
}

/// Serde adapter for `[Option<Rat>; 2]` fields (absent numerator exponents).
pub mod serde_opt_rat_pair {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &[Option<Rat>; 2], ser: S) -> Result<S::Ok, S::Error> {
        [
            x[0].as_ref().map(format_rat),
            x[1].as_ref().map(format_rat),
        ]
        .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<[Option<Rat>; 2], D::Error> {
        let raw = <[Option<String>; 2]>::deserialize(de)?;
        let parse = |o: &Option<String>| -> Result<Option<Rat>, D::Error> {
            o.as_deref()
                .map(|s| parse_rat(s).map_err(de::Error::custom))
                .transpose()
        };
        Ok([parse(&raw[0])?, parse(&raw[1])?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rat("3").unwrap(), rint(3));
        assert_eq!(parse_rat("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rat(" 7/3 ").unwrap(), rat(7, 3));
    }

    #[test]
    fn rejects_floats_and_zero_denominators() {
        assert!(parse_rat("1.5").is_err());
        assert!(parse_rat("1e3").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for r in [rat(1, 2), rint(-4), rat(22, 7), rat(-3, 8)] {
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }

    #[test]
    fn hoelder_conjugates() {
        assert_eq!(hoelder_conjugate(&rint(2)).unwrap(), rint(2));
        assert_eq!(hoelder_conjugate(&rat(3, 2)).unwrap(), rint(3));
        assert!(hoelder_conjugate(&rint(1)).is_none());
        // 1/p + 1/p' = 1 exactly
        let p = rat(7, 5);
        let pc = hoelder_conjugate(&p).unwrap();
        assert_eq!(p.recip() + pc.recip(), rint(1));
    }

    #[test]
    fn gamma_half_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma_half(1) - sqrt_pi).abs() < 1e-15);
        assert!((gamma_half(2) - 1.0).abs() < 1e-15);
        assert!((gamma_half(3) - 0.5 * sqrt_pi).abs() < 1e-15);
        assert!((gamma_half(4) - 1.0).abs() < 1e-15);
        assert!((gamma_half(6) - 2.0).abs() < 1e-14);
        assert!((gamma_half(5) - 0.75 * sqrt_pi).abs() < 1e-14);
    }
}

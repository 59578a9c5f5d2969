//! Exact number helpers shared by the numerical modules.
//!
//! Everything certified by this crate is an unbounded integer or an exact
//! rational. Floating point only appears in log-log slope fits, which go
//! through [`ln_int`] and [`ln_ratio`].

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Error produced when a string is not an exact rational literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not an exact rational literal: {0:?}")]
pub struct RationalParseError(pub String);

/// Parses `"7"`, `"-3/4"` or a finite decimal such as `"4.5"` / `"-1e-3"`.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let err = || RationalParseError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    if exponent.unsigned_abs() > 10_000 {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(&all_digits).map_err(|_| err())?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    Ok(value)
}

/// Natural logarithm of a positive integer of any size.
pub fn ln_int(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub fn ln_ratio(q: &BigRational) -> f64 {
    ln_int(q.numer()) - ln_int(q.denom())
}

/// Least integer `>= q`.
pub fn ceil_int(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

/// `floor(base^(exp) + 1/2)` for a positive rational exponent, computed exactly.
///
/// With `exp = p/q` this is `(floor((2^q * base^p)^(1/q)) + 1) div 2`. An
/// integer power with rational exponent is an integer or irrational, so ties
/// never occur.
pub fn round_half_up_pow(base: u64, exponent: &BigRational) -> BigInt {
    assert!(exponent.is_positive(), "exponent must be positive");
    let p = exponent
        .numer()
        .to_u32()
        .expect("exponent numerator out of range");
    let q = exponent
        .denom()
        .to_u32()
        .expect("exponent denominator out of range");
    let radicand = (BigInt::one() << q) * num_traits::pow(BigInt::from(base), p as usize);
    let twice_floor = radicand.nth_root(q);
    (twice_floor + 1u32).div_floor(&BigInt::from(2u32))
}

/// Decimal rendering of a rational as `p/q` (or `p` when integral).
pub struct RatDisplay<'a>(pub &'a BigRational);

impl fmt::Display for RatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Serde adapters storing exact numbers as decimal strings.
pub mod serde_exact {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    /// Rational stored as a numerator/denominator pair of decimal strings.
    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Pair {
        num: String,
        den: String,
    }

    pub mod int {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
            let text = String::deserialize(d)?;
            BigInt::from_str(&text)
                .map_err(|_| serde::de::Error::custom(format!("not a decimal integer: {text:?}")))
        }
    }

    pub mod rational {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            Pair {
                num: v.numer().to_string(),
                den: v.denom().to_string(),
            }
            .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
            let pair = Pair::deserialize(d)?;
            let num = BigInt::from_str(&pair.num).map_err(|_| {
                serde::de::Error::custom(format!("num is not a decimal integer: {:?}", pair.num))
            })?;
            let den = BigInt::from_str(&pair.den).map_err(|_| {
                serde::de::Error::custom(format!("den is not a decimal integer: {:?}", pair.den))
            })?;
            if den.is_zero() {
                return Err(serde::de::Error::custom("den is zero"));
            }
            Ok(BigRational::new(num, den))
        }
    }

    pub mod rational_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            use serde::ser::SerializeSeq;
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&Pair {
                    num: q.numer().to_string(),
                    den: q.denom().to_string(),
                })?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let pairs = Vec::<Pair>::deserialize(d)?;
            pairs
                .into_iter()
                .enumerate()
                .map(|(i, pair)| {
                    let num = BigInt::from_str(&pair.num).map_err(|_| {
                        serde::de::Error::custom(format!("[{i}].num is not a decimal integer"))
                    })?;
                    let den = BigInt::from_str(&pair.den).map_err(|_| {
                        serde::de::Error::custom(format!("[{i}].den is not a decimal integer"))
                    })?;
                    if den.is_zero() {
                        return Err(serde::de::Error::custom(format!("[{i}].den is zero")));
                    }
                    Ok(BigRational::new(num, den))
                })
                .collect()
        }
    }
}

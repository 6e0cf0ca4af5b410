//! Helpers around [`BigRational`], which backs every exact quantity in the crate.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (positive denominator, reduced).
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^-k` as a rational.
pub fn pow2_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `p`, `-p`, or `p/q`. Decimal strings such as `3.2` are accepted and
/// read exactly (`3.2` is `16/5`).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole: BigInt = match whole.trim() {
            "" | "-" | "+" => BigInt::zero(),
            w => w.parse().map_err(|_| bad())?,
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = whole.abs() * &scale + frac;
        let num = if negative { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Exact square root of a perfect square, `None` otherwise.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// Exact rational square root when `x = (p/q)^2`, decided on the reduced numerator and
/// denominator separately.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    let p = exact_isqrt(x.numer())?;
    let q = exact_isqrt(x.denom())?;
    Some(Rational::new(p, q))
}

/// Writes `n = k^2 * f` with `f` square-free and returns `(k, f)`.
pub fn square_free_decompose(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut k = 1u64;
    let mut f = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    // After removing every prime up to the cube root, the cofactor has at most two prime
    // factors, so it is either a prime square or square-free.
    while p.saturating_mul(p).saturating_mul(p) <= rest {
        let mut e = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if root > 1 && root * root == rest {
        k *= root;
    } else {
        f *= rest;
    }
    (k, f)
}

pub fn to_u64(n: &BigInt) -> Result<u64> {
    n.to_u64().ok_or_else(|| Error::RadicandOverflow(n.to_string()))
}

pub fn to_biguint(n: &BigInt) -> Option<BigUint> {
    match n.sign() {
        Sign::Minus => None,
        _ => n.to_biguint(),
    }
}

/// Largest integer not exceeding `x`.
pub fn floor(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Decimal approximation for human-facing hints only; never used in a decision.
pub fn approx(x: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (x * Rational::from_integer(scale.clone())).round().to_integer();
    let neg = scaled.is_negative();
    let mag = scaled.abs();
    let whole = &mag / &scale;
    let frac = &mag % &scale;
    let frac = format!("{:0>width$}", frac.to_string(), width = digits);
    format!("{}{}.{}", if neg { "-" } else { "" }, whole, frac)
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::{parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("77/24").unwrap(), ratio(77, 24));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("3.2").unwrap(), ratio(16, 5));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn square_free_parts() {
        assert_eq!(square_free_decompose(208), (4, 13));
        assert_eq!(square_free_decompose(12), (2, 3));
        assert_eq!(square_free_decompose(49), (7, 1));
        assert_eq!(square_free_decompose(13), (1, 13));
        assert_eq!(square_free_decompose(1), (1, 1));
        // 1_000_003 is prime
        assert_eq!(square_free_decompose(1_000_003 * 1_000_003), (1_000_003, 1));
        assert_eq!(square_free_decompose(2 * 1_000_003), (1, 2 * 1_000_003));
        for n in 1..2000u64 {
            let (k, f) = square_free_decompose(n);
            assert_eq!(k * k * f, n);
            for p in 2..=f {
                assert!(f % (p * p) != 0, "{n}: {f} not square-free");
                if p * p > f {
                    break;
                }
            }
        }
    }

    #[test]
    fn exact_square_detection() {
        assert_eq!(exact_sqrt(&ratio(1, 4)), Some(ratio(1, 2)));
        assert_eq!(exact_sqrt(&ratio(6, 25)), None);
        assert_eq!(exact_sqrt(&ratio(-1, 4)), None);
        assert_eq!(exact_sqrt(&int(0)), Some(int(0)));
    }

    #[test]
    fn approximations() {
        assert_eq!(approx(&ratio(77, 24), 6), "3.208333");
        assert_eq!(approx(&ratio(-1, 3), 3), "-0.333");
    }
}

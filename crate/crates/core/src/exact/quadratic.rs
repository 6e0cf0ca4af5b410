//! Real quadratic irrationals `a + b*sqrt(n)` with exact comparison.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::{sqrt_enclosure, RationalInterval};
use super::rational::{parse_rational, pow2_neg, square_free_decompose, to_u64, Rational};
use crate::error::{Error, Result};

/// `a + b*sqrt(rad)` in canonical form: `rad` is square-free and greater than one, or
/// the value is rational and stored as `(a, 0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: Rational,
    b: Rational,
    rad: u64,
}

impl QuadraticNumber {
    pub fn new(a: Rational, b: Rational, rad: u64) -> Self {
        if b.is_zero() || rad == 0 {
            return Self::rational(a);
        }
        let (k, f) = square_free_decompose(rad);
        let b = b * Rational::from_integer(BigInt::from(k));
        if f == 1 {
            Self::rational(a + b)
        } else {
            Self { a, b, rad: f }
        }
    }

    pub fn rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
            rad: 0,
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `sqrt(n)` for a nonnegative integer.
    pub fn sqrt_int(n: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), n)
    }

    /// `sqrt(x)` for a nonnegative rational, written as `sqrt(p*q)/q`.
    pub fn sqrt_of(x: &Rational) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::NegativeRadicand(x.to_string()));
        }
        let pq = to_u64(&(x.numer() * x.denom()))?;
        Ok(Self::new(
            Rational::zero(),
            Rational::new(BigInt::one(), x.denom().clone()),
            pq,
        ))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn rad(&self) -> u64 {
        self.rad
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn common_rad(&self, other: &Self) -> Result<u64> {
        match (self.rad, other.rad) {
            (0, n) | (n, 0) => Ok(n),
            (m, n) if m == n => Ok(m),
            (m, n) => Err(Error::IncompatibleRadicands(m, n)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let rad = self.common_rad(other)?;
        Ok(Self::new(&self.a + &other.a, &self.b + &other.b, rad))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let rad = self.common_rad(other)?;
        Ok(Self::new(&self.a - &other.a, &self.b - &other.b, rad))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let rad = self.common_rad(other)?;
        let n = Rational::from_integer(BigInt::from(rad));
        let a = &self.a * &other.a + &self.b * &other.b * n;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::new(a, b, rad))
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            rad: self.rad,
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.a * k, &self.b * k, self.rad)
    }

    pub fn add_rational(&self, k: &Rational) -> Self {
        Self::new(&self.a + k, self.b.clone(), self.rad)
    }

    pub fn square(&self) -> Self {
        self.checked_mul(self).expect("a number shares its own radicand")
    }

    /// `1/x` inside the same field, `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = Rational::from_integer(BigInt::from(self.rad));
        let norm = &self.a * &self.a - &self.b * &self.b * n;
        Some(Self::new(&self.a / &norm, -&self.b / &norm, self.rad))
    }

    /// Exact sign via the squaring case split on the signs of `a` and `b`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            _ => {
                let n = Rational::from_integer(BigInt::from(self.rad));
                let a2 = &self.a * &self.a;
                let b2n = &self.b * &self.b * n;
                // a and b have opposite signs: the larger magnitude decides.
                match a2.cmp(&b2n) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Decimal hint rounded to `digits` places; not used for any decision.
    pub fn approx(&self, digits: usize) -> String {
        let width = pow2_neg(4 * digits as u32 + 8);
        super::rational::approx(&self.enclose(&width).midpoint(), digits)
    }

    /// Dyadic enclosure of the value of width at most `|b| * width`.
    pub fn enclose(&self, width: &Rational) -> RationalInterval {
        if self.is_rational() {
            return RationalInterval::point(self.a.clone());
        }
        let n = Rational::from_integer(BigInt::from(self.rad));
        let root = sqrt_enclosure(&n, width).expect("radicand is positive");
        root.scale(&self.b).shift(&self.a)
    }

    /// Strict ordering by refining enclosures until they separate. Loops forever on
    /// equal inputs, so callers must rule out equality first.
    pub fn compare_by_refinement(&self, other: &Self) -> Ordering {
        let mut k = 8u32;
        loop {
            let w = pow2_neg(k);
            let x = self.enclose(&w);
            let y = other.enclose(&w);
            if x.hi() < y.lo() {
                return Ordering::Less;
            }
            if y.hi() < x.lo() {
                return Ordering::Greater;
            }
            k += 8;
        }
    }

    /// Total order on real values. Equality is symbolic (canonical forms coincide);
    /// within one field the sign of the difference is exact, across fields enclosures
    /// are refined until they separate.
    pub fn compare(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match self.checked_sub(other) {
            Ok(diff) => diff.signum(),
            Err(_) => self.compare_by_refinement(other),
        }
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl From<Rational> for QuadraticNumber {
    fn from(a: Rational) -> Self {
        Self::rational(a)
    }
}

impl From<i64> for QuadraticNumber {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let negative = self.b.is_negative();
        let coeff = self.b.abs();
        if !self.a.is_zero() {
            write!(f, "{} {} ", self.a, if negative { '-' } else { '+' })?;
        } else if negative {
            write!(f, "-")?;
        }
        if !coeff.is_one() {
            write!(f, "{coeff}*")?;
        }
        write!(f, "sqrt({})", self.rad)
    }
}

impl FromStr for QuadraticNumber {
    type Err = Error;

    /// Accepts sums of terms, each either a rational (`p/q`, decimal) or
    /// `[c*]sqrt(n)`, e.g. `4 - 1/3*sqrt(3)`, `13/3 + -1/6*sqrt(13)`, `sqrt(13)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a quadratic number: `{s}`"));
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad());
        }
        // split into signed terms at top-level '+'/'-' that are not exponent signs
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = text.as_bytes();
        for i in 1..bytes.len() {
            let c = bytes[i];
            let prev = bytes[i - 1];
            if (c == b'+' || c == b'-') && !matches!(prev, b'+' | b'-' | b'*' | b'/' | b'(') {
                terms.push(&text[start..i]);
                start = i;
            }
        }
        terms.push(&text[start..]);

        let mut acc = QuadraticNumber::integer(0);
        for term in terms {
            let term = term.strip_prefix('+').unwrap_or(term);
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term),
            };
            let value = if let Some(pos) = body.find("sqrt(") {
                let coeff = match &body[..pos] {
                    "" => Rational::one(),
                    c => parse_rational(c.strip_suffix('*').ok_or_else(bad)?)?,
                };
                let inner = body[pos + 5..].strip_suffix(')').ok_or_else(bad)?;
                let n: u64 = inner.parse().map_err(|_| bad())?;
                QuadraticNumber::sqrt_int(n).scale(&coeff)
            } else {
                QuadraticNumber::rational(parse_rational(body)?)
            };
            let value = if neg { value.neg() } else { value };
            acc = acc.checked_add(&value)?;
        }
        Ok(acc)
    }
}

impl serde::Serialize for QuadraticNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for QuadraticNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

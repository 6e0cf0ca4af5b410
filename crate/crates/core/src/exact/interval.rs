//! Closed intervals with exact rational endpoints.
//!
//! Endpoints are never rounded, so "outward rounding" reduces to taking the exact
//! extremes; only square roots introduce enclosure width.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{exact_sqrt, floor, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalInterval {
    #[serde(with = "super::rational::serde_str")]
    lo: Rational,
    #[serde(with = "super::rational::serde_str")]
    hi: Rational,
}

impl RationalInterval {
    /// Builds `[lo, hi]`; the endpoints are swapped if given out of order.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self { lo: hi, hi: lo }
        }
    }

    pub fn point(x: Rational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    pub fn bisect(&self) -> (Self, Self) {
        let mid = self.midpoint();
        (
            Self {
                lo: self.lo.clone(),
                hi: mid.clone(),
            },
            Self {
                lo: mid,
                hi: self.hi.clone(),
            },
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.lo * k, &self.hi * k)
    }

    pub fn shift(&self, k: &Rational) -> Self {
        Self {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    /// Square with the tight lower bound 0 when the interval straddles zero.
    pub fn square(&self) -> Self {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            Self {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        } else {
            Self::new(a, b)
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::DivisionByZeroInterval(self.to_string()));
        }
        Ok(Self::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// Outer enclosure of `sqrt` over the interval. A negative lower endpoint is clamped
    /// to zero (the caller asserts the true radicand is nonnegative); an interval lying
    /// entirely below zero is an error.
    pub fn sqrt(&self, width: &Rational) -> Result<Self> {
        if self.hi.is_negative() {
            return Err(Error::NegativeRadicandInterval(self.to_string()));
        }
        let lo = if self.lo.is_positive() {
            sqrt_enclosure(&self.lo, width)?.lo
        } else {
            Rational::zero()
        };
        let hi = sqrt_enclosure(&self.hi, width)?.hi;
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl From<Rational> for RationalInterval {
    fn from(x: Rational) -> Self {
        Self::point(x)
    }
}

impl Add for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, rhs: Self) -> RationalInterval {
        RationalInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &RationalInterval {
    type Output = RationalInterval;
    fn sub(self, rhs: Self) -> RationalInterval {
        RationalInterval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, rhs: Self) -> RationalInterval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        RationalInterval { lo, hi }
    }
}

impl Neg for &RationalInterval {
    type Output = RationalInterval;
    fn neg(self) -> RationalInterval {
        RationalInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalInterval {
            type Output = RationalInterval;
            fn $m(self, rhs: Self) -> RationalInterval {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Dyadic enclosure `[lo, hi]` of `sqrt(x)` with `lo^2 <= x <= hi^2` and
/// `hi - lo <= width`; exact when `x` is the square of a rational.
pub fn sqrt_enclosure(x: &Rational, width: &Rational) -> Result<RationalInterval> {
    if x.is_negative() {
        return Err(Error::NegativeRadicand(x.to_string()));
    }
    if !width.is_positive() {
        return Err(Error::Parse(format!(
            "enclosure width must be positive, got {width}"
        )));
    }
    if let Some(root) = exact_sqrt(x) {
        return Ok(RationalInterval::point(root));
    }
    let one = Rational::from_integer(BigInt::from(1));
    let mut k = 0u32;
    let mut step = one.clone();
    while &step > width {
        k += 1;
        step /= Rational::from_integer(BigInt::from(2));
    }
    let scale = BigInt::from(1) << (2 * k);
    let n = floor(&(x * Rational::from_integer(scale)));
    let s = n.sqrt();
    let denom = BigInt::from(1) << k;
    Ok(RationalInterval {
        lo: Rational::new(s.clone(), denom.clone()),
        hi: Rational::new(s + 1, denom),
    })
}

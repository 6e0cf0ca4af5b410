//! Divisor classes `dH - sum m_i E_i` on the blow-up of the plane at `r` very general
//! points, and the set of uniform polarizations for which a class is weakly submaximal.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::int;
use crate::exact::{QuadraticNumber, Rational};

pub(crate) fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// A class `dH - sum m_i E_i`. Interior classes have `d >= 1` and all `m_i >= 0`;
/// the exceptional curve `E_i` is stored as `d = 0` with a single `-1` entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveClass {
    d: i64,
    mults: Vec<i64>,
}

impl CurveClass {
    pub fn new(d: i64, mults: Vec<i64>) -> Result<Self> {
        let class = Self { d, mults };
        let interior = class.d >= 1 && class.mults.iter().all(|&m| m >= 0);
        if !interior && !class.is_exceptional() {
            return Err(Error::InvalidClass(class.to_string()));
        }
        Ok(class)
    }

    /// The exceptional curve over the `i`-th of `r` points.
    pub fn exceptional(r: usize, i: usize) -> Self {
        assert!(i < r, "point index {i} out of range for r = {r}");
        let mut mults = vec![0; r];
        mults[i] = -1;
        Self { d: 0, mults }
    }

    /// Builds a class from runs `(multiplicity, count)`, padded with zeros to width `r`.
    pub fn from_runs(d: i64, runs: &[(i64, usize)], r: usize) -> Result<Self> {
        let mut mults = Vec::with_capacity(r);
        for &(m, e) in runs {
            mults.extend(std::iter::repeat_n(m, e));
        }
        if mults.len() > r {
            return Err(Error::WidthMismatch {
                expected: r,
                got: mults.len(),
            });
        }
        mults.resize(r, 0);
        Self::new(d, mults)
    }

    /// Parses `(d; m1^e1, m2^e2, ...)` and pads with zero multiplicities to width `r`.
    pub fn parse_with_width(s: &str, r: usize) -> Result<Self> {
        let class: Self = s.parse()?;
        if class.r() > r {
            return Err(Error::WidthMismatch {
                expected: r,
                got: class.r(),
            });
        }
        let mut mults = class.mults;
        mults.resize(r, 0);
        Self::new(class.d, mults)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn mults(&self) -> &[i64] {
        &self.mults
    }

    pub fn r(&self) -> usize {
        self.mults.len()
    }

    pub fn is_exceptional(&self) -> bool {
        self.d == 0
            && self.mults.iter().filter(|&&m| m == -1).count() == 1
            && self.mults.iter().all(|&m| m == 0 || m == -1)
    }

    /// `M = sum m_i`.
    pub fn total_multiplicity(&self) -> i64 {
        self.mults.iter().sum()
    }

    /// `M / r`.
    pub fn average_multiplicity(&self) -> Rational {
        Rational::new(self.total_multiplicity().into(), (self.r() as i64).into())
    }

    /// `sum C(m_i+1, 2)`, the number of conditions imposed by the fat points.
    pub fn conditions(&self) -> i64 {
        self.mults.iter().map(|&m| binom2(m + 1)).sum()
    }

    /// `C(d+2, 2) - sum C(m_i+1, 2)`, one more than the virtual dimension.
    pub fn conditions_margin(&self) -> i64 {
        binom2(self.d + 2) - self.conditions()
    }

    fn require_interior(&self) -> Result<()> {
        if self.is_exceptional() {
            Err(Error::ExceptionalClassUnsupported)
        } else {
            Ok(())
        }
    }

    /// The class with one more multiplicity-zero entry, i.e. an extra simple base point
    /// imposed at a new very general point.
    pub fn with_simple_point(&self) -> Self {
        let mut mults = self.mults.clone();
        mults.push(1);
        Self { d: self.d, mults }
    }
}

impl fmt::Display for CurveClass {
    /// Run-length form `(10;4,3^9)`: unit exponents are omitted and a trailing run of
    /// zero multiplicities is dropped.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut runs: Vec<(i64, usize)> = Vec::new();
        for &m in &self.mults {
            match runs.last_mut() {
                Some((v, n)) if *v == m => *n += 1,
                _ => runs.push((m, 1)),
            }
        }
        if matches!(runs.last(), Some((0, _))) {
            runs.pop();
        }
        write!(f, "({};", self.d)?;
        for (i, (m, n)) in runs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if *n == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{m}^{n}")?;
            }
        }
        write!(f, ")")
    }
}

impl FromStr for CurveClass {
    type Err = Error;

    /// Parses `(d; m1^e1, m2, ...)`; braces around exponents (`1^{11}`) are tolerated.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a curve class: `{s}`"));
        let text: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '{' && *c != '}')
            .collect();
        let inner = text
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (d, rest) = inner.split_once(';').ok_or_else(bad)?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        let mut mults = Vec::new();
        if !rest.is_empty() {
            for run in rest.split(',') {
                let (m, e) = match run.split_once('^') {
                    Some((m, e)) => (m, e.parse::<usize>().map_err(|_| bad())?),
                    None => (run, 1),
                };
                let m: i64 = m.parse().map_err(|_| bad())?;
                mults.extend(std::iter::repeat_n(m, e));
            }
        }
        Self::new(d, mults)
    }
}

/// `L(mu) = mu H - (E_1 + ... + E_r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformPolarization {
    r: usize,
    mu: QuadraticNumber,
}

impl UniformPolarization {
    pub fn new(r: usize, mu: QuadraticNumber) -> Result<Self> {
        if mu.signum() != Ordering::Greater {
            return Err(Error::Parse(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { r, mu })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn mu(&self) -> &QuadraticNumber {
        &self.mu
    }

    /// `L(mu)^2 = mu^2 - r`.
    pub fn self_intersection(&self) -> QuadraticNumber {
        self.mu.square().add_rational(&-int(self.r as i64))
    }
}

/// An interval of `mu` values with quadratic-number endpoints; `hi = None` is `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuInterval {
    pub lo: QuadraticNumber,
    pub hi: Option<QuadraticNumber>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl MuInterval {
    pub fn closed(lo: QuadraticNumber, hi: QuadraticNumber) -> Self {
        Self {
            lo,
            hi: Some(hi),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn ray(lo: QuadraticNumber, lo_closed: bool) -> Self {
        Self {
            lo,
            hi: None,
            lo_closed,
            hi_closed: false,
        }
    }

    pub fn contains(&self, mu: &QuadraticNumber) -> bool {
        let above = match mu.compare(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match &self.hi {
            None => true,
            Some(hi) => match mu.compare(hi) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Greater => false,
            },
        };
        above && below
    }
}

impl fmt::Display for MuInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        match &self.hi {
            Some(hi) => {
                let close = if self.hi_closed { ']' } else { ')' };
                write!(f, "{open}{}, {}{close}", self.lo, hi)
            }
            None => write!(f, "{open}{}, inf)", self.lo),
        }
    }
}

/// `C^2 = d^2 - sum m_i^2`.
pub fn self_intersection(c: &CurveClass) -> i64 {
    c.d * c.d - c.mults.iter().map(|m| m * m).sum::<i64>()
}

/// `L(mu) . C = mu d - sum m_i`.
pub fn degree_against(l: &UniformPolarization, c: &CurveClass) -> Result<QuadraticNumber> {
    if c.r() != l.r {
        return Err(Error::WidthMismatch {
            expected: l.r,
            got: c.r(),
        });
    }
    Ok(l.mu.scale(&int(c.d)).add_rational(&-int(c.total_multiplicity())))
}

/// `max{C(d+2,2) - sum C(m_i+1,2) - 1, -1}`.
pub fn expected_dim(c: &CurveClass) -> Result<i64> {
    c.require_interior()?;
    Ok((c.conditions_margin() - 1).max(-1))
}

/// `(d-1)(d-2)/2 - sum m_i(m_i-1)/2`.
pub fn arithmetic_genus(c: &CurveClass) -> Result<i64> {
    c.require_interior()?;
    Ok(binom2(c.d - 1) - c.mults.iter().map(|&m| binom2(m)).sum::<i64>())
}

fn check_index(c: &CurveClass, t: i64, r: usize) -> Result<()> {
    if c.r() != r {
        return Err(Error::WidthMismatch {
            expected: r,
            got: c.r(),
        });
    }
    let ok = if c.is_exceptional() {
        t == 1
    } else {
        t >= 1 && t < c.d
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidMultiplicityIndex { t, d: c.d })
    }
}

/// `R(mu) = (d^2 - t^2) mu^2 - 2 d M mu + (M^2 + t^2 r)`, the squared form of
/// `(d mu - M)/t <= sqrt(mu^2 - r)`.
pub fn rationality_quadratic(c: &CurveClass, t: i64, mu: &QuadraticNumber) -> QuadraticNumber {
    let (d, m, r) = (c.d, c.total_multiplicity(), c.r() as i64);
    mu.square()
        .scale(&int(d * d - t * t))
        .checked_add(&mu.scale(&int(-2 * d * m)))
        .expect("powers of mu share a field")
        .add_rational(&int(m * m + t * t * r))
}

/// The roots `mu_-` and `mu_+` of [`rationality_quadratic`] together with the reduced
/// discriminant `Delta = M^2 - r(d^2 - t^2)`; roots are absent when `Delta < 0`.
pub fn rationality_roots(c: &CurveClass, t: i64) -> (i64, Option<(QuadraticNumber, QuadraticNumber)>) {
    let (d, m, r) = (c.d, c.total_multiplicity(), c.r() as i64);
    let lead = d * d - t * t;
    let delta = m * m - r * lead;
    if delta < 0 {
        return (delta, None);
    }
    let centre = Rational::new((d * m).into(), lead.into());
    let spread = QuadraticNumber::sqrt_int(delta as u64).scale(&Rational::new(t.into(), lead.into()));
    let minus = spread.neg().add_rational(&centre);
    let plus = spread.add_rational(&centre);
    (delta, Some((minus, plus)))
}

/// All `mu >= sqrt(r)` with `R(mu) <= 0`, as closed intervals; `[sqrt(r+1), inf)` for
/// an exceptional curve.
///
/// Where `d mu - M <= 0` the unsquared inequality holds trivially; those points are not
/// part of this set. [`locus_is_positive`] reports whether the set avoids them.
pub fn submaximal_locus(c: &CurveClass, t: i64, r: usize) -> Result<Vec<MuInterval>> {
    check_index(c, t, r)?;
    let sqrt_r = QuadraticNumber::sqrt_int(r as u64);
    if c.is_exceptional() {
        return Ok(vec![MuInterval::ray(
            QuadraticNumber::sqrt_int(r as u64 + 1),
            true,
        )]);
    }
    let (_, roots) = rationality_roots(c, t);
    let Some((minus, plus)) = roots else {
        return Ok(Vec::new());
    };
    if plus < sqrt_r {
        return Ok(Vec::new());
    }
    let lo = if minus < sqrt_r { sqrt_r } else { minus };
    Ok(vec![MuInterval::closed(lo, plus)])
}

/// True when `L(mu) . C > 0` at every point of the locus, i.e. the squaring step behind
/// [`submaximal_locus`] is an equivalence there.
pub fn locus_is_positive(c: &CurveClass, t: i64, r: usize) -> Result<bool> {
    let locus = submaximal_locus(c, t, r)?;
    if c.is_exceptional() {
        return Ok(true);
    }
    let threshold = QuadraticNumber::rational(Rational::new(c.total_multiplicity().into(), c.d.into()));
    Ok(locus.iter().all(|iv| iv.lo > threshold))
}

/// Decides `(L . C)/t <= sqrt(L^2)` exactly. Returns false when `L^2 <= 0`.
pub fn is_weakly_submaximal(c: &CurveClass, t: i64, l: &UniformPolarization) -> Result<bool> {
    check_index(c, t, l.r)?;
    let l2 = l.self_intersection();
    if l2.signum() != Ordering::Greater {
        return Ok(false);
    }
    let lhs = degree_against(l, c)?;
    if lhs.signum() != Ordering::Greater {
        return Ok(true);
    }
    let lhs2 = lhs.square();
    let rhs2 = l2.scale(&int(t * t));
    Ok(lhs2.compare(&rhs2) != Ordering::Greater)
}

/// True when `mu` lies in the union of the intervals.
pub fn union_contains(intervals: &[MuInterval], mu: &QuadraticNumber) -> bool {
    intervals.iter().any(|iv| iv.contains(mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;

    fn class(s: &str, r: usize) -> CurveClass {
        CurveClass::parse_with_width(s, r).unwrap()
    }

    fn q(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    fn l(r: usize, mu: &str) -> UniformPolarization {
        UniformPolarization::new(r, q(mu)).unwrap()
    }

    #[test]
    fn parse_print() {
        let c: CurveClass = "(10;4,3^9)".parse().unwrap();
        assert_eq!(c.d(), 10);
        assert_eq!(c.r(), 10);
        assert_eq!(c.total_multiplicity(), 31);
        assert_eq!(c.to_string(), "(10;4,3^9)");
        let c = class("(4;2^1,1^{11})", 12);
        assert_eq!(c.to_string(), "(4;2,1^11)");
        let c = class("(3;1^8)", 12);
        assert_eq!(c.mults().len(), 12);
        assert_eq!(c.to_string(), "(3;1^8)");
        assert_eq!(CurveClass::exceptional(10, 0).to_string(), "(0;-1)");
        assert!(CurveClass::exceptional(10, 0).is_exceptional());
        assert!("(2;-1)".parse::<CurveClass>().is_err());
        assert!("(0;-1,-1)".parse::<CurveClass>().is_err());
        assert!("(3;1^9".parse::<CurveClass>().is_err());
        assert!(CurveClass::parse_with_width("(3;1^9)", 8).is_err());
    }

    #[test]
    fn intersections() {
        assert_eq!(self_intersection(&class("(3;1^9)", 9)), 0);
        assert_eq!(self_intersection(&CurveClass::exceptional(10, 0)), -1);
        assert_eq!(self_intersection(&class("(10;4,3^9)", 10)), 3);
    }

    #[test]
    fn degrees() {
        let mu = q("sqrt(11)");
        let lmu = UniformPolarization::new(9, mu.clone()).unwrap();
        assert_eq!(
            degree_against(&lmu, &class("(3;1^9)", 9)).unwrap(),
            mu.scale(&int(3)).add_rational(&int(-9))
        );
        let lmu = UniformPolarization::new(10, mu.clone()).unwrap();
        assert_eq!(
            degree_against(&lmu, &CurveClass::exceptional(10, 3)).unwrap(),
            QuadraticNumber::integer(1)
        );
        assert_eq!(
            degree_against(&lmu, &class("(10;4,3^9)", 10)).unwrap(),
            mu.scale(&int(10)).add_rational(&int(-31))
        );
        assert!(degree_against(&lmu, &class("(3;1^9)", 9)).is_err());
    }

    #[test]
    fn dimensions_and_genus() {
        assert_eq!(expected_dim(&class("(10;4,3^9)", 10)).unwrap(), 1);
        assert_eq!(expected_dim(&class("(6;2^8)", 8)).unwrap(), 3);
        assert_eq!(expected_dim(&class("(1;0^12)", 12)).unwrap(), 2);
        assert_eq!(expected_dim(&class("(2;1^7)", 7)).unwrap(), -1);
        assert_eq!(arithmetic_genus(&class("(10;4,3^9)", 10)).unwrap(), 3);
        assert_eq!(arithmetic_genus(&class("(3;1^9)", 9)).unwrap(), 1);
        assert_eq!(arithmetic_genus(&class("(1;0^5)", 5)).unwrap(), 0);
        let e = CurveClass::exceptional(10, 0);
        assert_eq!(expected_dim(&e), Err(Error::ExceptionalClassUnsupported));
        assert_eq!(arithmetic_genus(&e), Err(Error::ExceptionalClassUnsupported));
    }

    #[test]
    fn loci_from_the_theorems() {
        let cases = [
            ("(10;4,3^9)", 2, 10, "77/24", "13/4"),
            ("(3;1^9)", 1, 10, "13/4", "7/2"),
            ("(4;2,1^10)", 2, 11, "4 - 1/3*sqrt(3)", "4 + 1/3*sqrt(3)"),
            ("(3;1^9)", 1, 9, "3", "15/4"),
            ("(6;3,2^7)", 1, 8, "99/35", "3"),
            ("(4;1^13)", 2, 13, "13/3 - 1/6*sqrt(13)", "13/3 + 1/6*sqrt(13)"),
        ];
        for (c, t, r, lo, hi) in cases {
            let c = class(c, r);
            let locus = submaximal_locus(&c, t, r).unwrap();
            assert_eq!(locus, vec![MuInterval::closed(q(lo), q(hi))], "{c}");
            for end in [q(lo), q(hi)] {
                assert!(rationality_quadratic(&c, t, &end).is_zero());
            }
        }
        let e = submaximal_locus(&CurveClass::exceptional(10, 0), 1, 10).unwrap();
        assert_eq!(e, vec![MuInterval::ray(q("sqrt(11)"), true)]);
    }

    #[test]
    fn locus_errors_and_empty_cases() {
        let c = class("(3;1^9)", 10);
        assert_eq!(
            submaximal_locus(&c, 3, 10),
            Err(Error::InvalidMultiplicityIndex { t: 3, d: 3 })
        );
        assert!(submaximal_locus(&CurveClass::exceptional(10, 0), 2, 10).is_err());
        // (2;1^5) at r = 12: Delta = 25 - 36 < 0
        assert!(submaximal_locus(&class("(2;1^5)", 12), 1, 12).unwrap().is_empty());
    }

    #[test]
    fn positivity_guard() {
        assert!(locus_is_positive(&class("(10;4,3^9)", 10), 2, 10).unwrap());
        assert!(locus_is_positive(&class("(3;1^9)", 10), 1, 10).unwrap());
        // 6 mu - 17 changes sign at 17/6 > 99/35
        assert!(!locus_is_positive(&class("(6;3,2^7)", 8), 1, 8).unwrap());
    }

    #[test]
    fn weak_submaximality() {
        assert!(is_weakly_submaximal(&class("(3;1^9)", 9), 1, &l(9, "7/2")).unwrap());
        assert!(!is_weakly_submaximal(&class("(10;4,3^9)", 10), 2, &l(10, "16/5")).unwrap());
        assert!(!is_weakly_submaximal(&class("(3;1^9)", 9), 1, &l(9, "4")).unwrap());
        assert!(is_weakly_submaximal(&class("(10;4,3^9)", 10), 2, &l(10, "77/24")).unwrap());
        // L^2 <= 0
        assert!(!is_weakly_submaximal(&class("(3;1^9)", 9), 1, &l(9, "3")).unwrap());
        assert!(is_weakly_submaximal(&CurveClass::exceptional(10, 0), 1, &l(10, "sqrt(11)")).unwrap());
        assert!(!is_weakly_submaximal(&CurveClass::exceptional(10, 0), 1, &l(10, "33/10")).unwrap());
        let mu = ratio(7, 2);
        assert!(UniformPolarization::new(9, QuadraticNumber::rational(-mu)).is_err());
    }

    #[test]
    fn simple_point_drops_edim() {
        let c = class("(6;2^8)", 8);
        let e0 = expected_dim(&c).unwrap();
        let e1 = expected_dim(&c.with_simple_point()).unwrap();
        assert_eq!(e1, e0 - 1);
    }
}

//! Submaximality thresholds, the catalog of witness curves, coverage of the
//! ample range by their loci, and the rationality classifier for `eps(L(mu))`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{exact_sqrt, int, ratio, serde_str};
use crate::exact::{QuadraticNumber, Rational};
use crate::surface::{submaximal_locus, union_contains, CurveClass, MuInterval};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub r: i64,
    pub mu0: QuadraticNumber,
    /// The lower-bound direction assumes the non-reducedness conjecture.
    pub conditional: bool,
}

/// `mu0(r)` for `r >= 10`.
pub fn threshold(r: i64) -> Result<ThresholdEntry> {
    let mu0 = match r {
        ..=9 => return Err(Error::UnsupportedR(r)),
        10 => QuadraticNumber::rational(ratio(77, 24)),
        11 => QuadraticNumber::new(int(4), ratio(-1, 3), 3),
        13 => QuadraticNumber::new(ratio(13, 3), ratio(-1, 6), 13),
        _ => QuadraticNumber::sqrt_int(r as u64 + 1),
    };
    debug_assert!(mu0 >= QuadraticNumber::sqrt_int(r as u64));
    Ok(ThresholdEntry {
        r,
        mu0,
        conditional: true,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogCurve {
    pub r: i64,
    #[serde(with = "class_str")]
    pub class: CurveClass,
    pub t: i64,
    pub source: String,
}

mod class_str {
    use crate::surface::CurveClass;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &CurveClass, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(c)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CurveClass, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl CatalogCurve {
    pub fn locus(&self) -> Vec<MuInterval> {
        submaximal_locus(&self.class, self.t, self.r as usize).expect("catalog classes are valid")
    }
}

/// Known weakly submaximal curves for `r` points. Interior classes come first in
/// increasing degree, the exceptional curve last.
pub fn catalog(r: i64) -> Vec<CatalogCurve> {
    let ru = r.max(1) as usize;
    let curve = |d, runs: &[(i64, usize)], t, source: &str| CatalogCurve {
        r,
        class: CurveClass::from_runs(d, runs, ru).expect("catalog class fits r"),
        t,
        source: source.to_string(),
    };
    let mut out = Vec::new();
    match r {
        8 => out.push(curve(6, &[(3, 1), (2, 7)], 1, "sextic with a triple point")),
        9 => out.push(curve(3, &[(1, 9)], 1, "cubic through nine points")),
        10 => {
            out.push(curve(3, &[(1, 9)], 1, "cubic through nine points"));
            out.push(curve(10, &[(4, 1), (3, 9)], 2, "pencil of degree 10"));
        }
        11 => out.push(curve(
            4,
            &[(2, 1), (1, 10)],
            2,
            "pencil of quartics with a double point",
        )),
        13 => out.push(curve(4, &[(1, 13)], 2, "pencil of quartics")),
        _ => {}
    }
    out.push(CatalogCurve {
        r,
        class: CurveClass::exceptional(ru, 0),
        t: 1,
        source: "exceptional curve".to_string(),
    });
    out
}

/// The part of the `mu`-line that the catalog must cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageTarget {
    pub lo: QuadraticNumber,
    pub lo_closed: bool,
}

impl fmt::Display for CoverageTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        write!(f, "{open}{}, inf)", self.lo)
    }
}

/// `[mu0, inf)` for `r >= 10`; the ample range `(17/6, inf)` and `(3, inf)` for `r` 8 and 9.
pub fn coverage_target(r: i64) -> Option<CoverageTarget> {
    match r {
        8 => Some(CoverageTarget {
            lo: QuadraticNumber::rational(ratio(17, 6)),
            lo_closed: false,
        }),
        9 => Some(CoverageTarget {
            lo: QuadraticNumber::integer(3),
            lo_closed: false,
        }),
        10.. => Some(CoverageTarget {
            lo: threshold(r).ok()?.mu0,
            lo_closed: true,
        }),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    #[serde(with = "class_str")]
    pub class: CurveClass,
    pub t: i64,
    pub interval: MuInterval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub r: i64,
    pub target: Option<CoverageTarget>,
    pub covered: bool,
    pub chain: Vec<ChainLink>,
    pub gaps: Vec<String>,
}

/// Greedy chaining of catalog loci from the target's left end to infinity.
pub fn verify_coverage(r: i64) -> CoverageReport {
    let Some(target) = coverage_target(r) else {
        return CoverageReport {
            r,
            target: None,
            covered: false,
            chain: Vec::new(),
            gaps: vec![format!("no catalog for r = {r}")],
        };
    };
    let pieces: Vec<(CatalogCurve, MuInterval)> = catalog(r)
        .into_iter()
        .flat_map(|c| c.locus().into_iter().map(move |i| (c.clone(), i)))
        .collect();

    let mut chain = Vec::new();
    let mut gaps = Vec::new();
    // everything below `x` is covered; `x` itself is covered iff `x_covered`
    let mut x = target.lo.clone();
    let mut x_covered = !target.lo_closed;
    loop {
        let reaches = |i: &MuInterval| match i.lo.cmp(&x) {
            Ordering::Less => true,
            Ordering::Equal => x_covered || i.lo_closed,
            Ordering::Greater => false,
        };
        let extends = |i: &MuInterval| match &i.hi {
            None => true,
            Some(hi) => hi > &x || (hi == &x && i.hi_closed && !x_covered),
        };
        let best = pieces
            .iter()
            .filter(|(_, i)| reaches(i) && extends(i))
            .max_by(|(_, a), (_, b)| match (&a.hi, &b.hi) {
                (None, None) => Ordering::Equal,
                (None, _) => Ordering::Greater,
                (_, None) => Ordering::Less,
                (Some(p), Some(q)) => p.cmp(q).then(a.hi_closed.cmp(&b.hi_closed)),
            });
        match best {
            Some((curve, interval)) => {
                chain.push(ChainLink {
                    class: curve.class.clone(),
                    t: curve.t,
                    interval: interval.clone(),
                });
                match &interval.hi {
                    None => break,
                    Some(hi) => {
                        x = hi.clone();
                        x_covered = interval.hi_closed;
                    }
                }
            }
            None => {
                let next = pieces
                    .iter()
                    .map(|(_, i)| &i.lo)
                    .filter(|lo| *lo > &x)
                    .min()
                    .cloned();
                match next {
                    Some(lo) => {
                        gaps.push(format!("({x}, {lo})"));
                        x = lo;
                        x_covered = false;
                    }
                    None => {
                        gaps.push(format!("({x}, inf)"));
                        break;
                    }
                }
            }
        }
    }
    CoverageReport {
        r,
        target: Some(target),
        covered: gaps.is_empty(),
        chain,
        gaps,
    }
}

/// Left end of the connected piece of the catalog's union that contains the
/// exceptional ray.
pub fn coverage_infimum(r: i64) -> QuadraticNumber {
    let loci: Vec<MuInterval> = catalog(r).iter().flat_map(CatalogCurve::locus).collect();
    let mut lo = loci
        .iter()
        .filter(|i| i.hi.is_none())
        .map(|i| i.lo.clone())
        .min()
        .expect("the exceptional curve gives a ray");
    while let Some(next) = loci
        .iter()
        .filter(|i| i.lo < lo && i.hi.as_ref().is_some_and(|h| h >= &lo))
        .map(|i| i.lo.clone())
        .min()
    {
        lo = next;
    }
    lo
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum VerdictKind {
    RationalWithWitness {
        #[serde(with = "class_str")]
        class: CurveClass,
        t: i64,
    },
    RationalSqrt {
        #[serde(with = "serde_str")]
        root: Rational,
    },
    ConditionallyIrrational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub r: i64,
    #[serde(with = "serde_str")]
    pub mu: Rational,
    pub mu0: QuadraticNumber,
    pub below_threshold: bool,
    /// `L(mu)^2 = mu^2 - r`.
    #[serde(with = "serde_str")]
    pub self_intersection: Rational,
    pub self_intersection_is_square: bool,
    pub verdict: VerdictKind,
    pub conditional_on_conjecture: bool,
}

/// Rationality of `eps(L(mu))` for rational `mu > sqrt r`, assuming `L(mu)` is ample.
pub fn classify(r: i64, mu: &Rational) -> Result<Classification> {
    let entry = threshold(r)?;
    let mu_q = QuadraticNumber::rational(mu.clone());
    if mu_q <= QuadraticNumber::sqrt_int(r as u64) {
        return Err(Error::NotAboveSqrtR(mu.to_string()));
    }
    let self_intersection = mu * mu - int(r);
    let root = exact_sqrt(&self_intersection);
    let below_threshold = mu_q < entry.mu0;
    let verdict = if !below_threshold {
        let witness = catalog(r)
            .into_iter()
            .find(|c| union_contains(&c.locus(), &mu_q))
            .ok_or_else(|| Error::CoverageGap(mu.to_string()))?;
        VerdictKind::RationalWithWitness {
            class: witness.class,
            t: witness.t,
        }
    } else if let Some(root) = root.clone() {
        VerdictKind::RationalSqrt { root }
    } else {
        VerdictKind::ConditionallyIrrational
    };
    let conditional_on_conjecture = verdict == VerdictKind::ConditionallyIrrational;
    Ok(Classification {
        r,
        mu: mu.clone(),
        mu0: entry.mu0,
        below_threshold,
        self_intersection,
        self_intersection_is_square: root.is_some(),
        verdict,
        conditional_on_conjecture,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qn(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    #[test]
    fn threshold_values() {
        assert_eq!(threshold(10).unwrap().mu0, qn("77/24"));
        assert_eq!(threshold(11).unwrap().mu0, qn("4 - 1/3*sqrt(3)"));
        assert_eq!(threshold(12).unwrap().mu0, qn("sqrt(13)"));
        assert_eq!(threshold(13).unwrap().mu0, qn("13/3 - 1/6*sqrt(13)"));
        assert_eq!(threshold(50).unwrap().mu0, qn("sqrt(51)"));
        assert_eq!(threshold(9), Err(Error::UnsupportedR(9)));
        for r in 10..=40 {
            let e = threshold(r).unwrap();
            assert!(e.conditional);
            assert!(e.mu0 > QuadraticNumber::sqrt_int(r as u64));
            assert!(e.mu0 <= QuadraticNumber::sqrt_int(r as u64 + 1));
        }
    }

    #[test]
    fn catalog_contents() {
        let names = |r| {
            catalog(r)
                .iter()
                .map(|c| (c.class.to_string(), c.t))
                .collect::<Vec<_>>()
        };
        assert_eq!(
            names(13),
            [("(4;1^13)".to_string(), 2), ("(0;-1)".to_string(), 1)]
        );
        assert_eq!(names(12), [("(0;-1)".to_string(), 1)]);
        assert_eq!(
            names(8),
            [("(6;3,2^7)".to_string(), 1), ("(0;-1)".to_string(), 1)]
        );
        assert_eq!(names(10).len(), 3);
        for r in 1..=20 {
            for c in catalog(r) {
                assert!(!c.locus().is_empty(), "{} empty at r = {r}", c.class);
            }
        }
    }

    #[test]
    fn coverage_chains() {
        let report = verify_coverage(10);
        assert!(report.covered, "{:?}", report.gaps);
        let ends: Vec<String> = report.chain.iter().map(|l| l.interval.to_string()).collect();
        assert_eq!(ends, ["[77/24, 13/4]", "[13/4, 7/2]", "[sqrt(11), inf)"]);

        let report = verify_coverage(11);
        assert!(report.covered);
        assert_eq!(report.chain.len(), 2);
        assert_eq!(report.chain[0].interval.lo, qn("4 - 1/3*sqrt(3)"));
        assert_eq!(report.chain[0].interval.hi, Some(qn("4 + 1/3*sqrt(3)")));

        for r in [8, 9, 12, 13, 14, 19, 30] {
            assert!(verify_coverage(r).covered, "r = {r}");
        }
        let report = verify_coverage(9);
        assert_eq!(report.chain[0].interval.hi, Some(qn("15/4")));
        assert!(!verify_coverage(7).covered);
    }

    #[test]
    fn coverage_gap_is_reported() {
        // the exceptional ray alone does not reach 77/24 for r = 10
        let target = coverage_target(10).unwrap();
        assert!(target.lo < QuadraticNumber::sqrt_int(11));
        assert_eq!(coverage_infimum(12), qn("sqrt(13)"));
    }

    #[test]
    fn infimum_matches_threshold() {
        for r in 10..=19 {
            assert_eq!(coverage_infimum(r), threshold(r).unwrap().mu0, "r = {r}");
        }
    }

    #[test]
    fn classify_examples() {
        let c = classify(10, &ratio(16, 5)).unwrap();
        assert_eq!(c.verdict, VerdictKind::ConditionallyIrrational);
        assert!(c.below_threshold && c.conditional_on_conjecture);
        assert_eq!(c.self_intersection, ratio(6, 25));
        assert!(!c.self_intersection_is_square);

        let c = classify(10, &ratio(7, 2)).unwrap();
        let VerdictKind::RationalWithWitness { class, t } = c.verdict else {
            panic!("expected a witness");
        };
        assert_eq!((class.to_string(), t), ("(3;1^9)".to_string(), 1));

        let c = classify(12, &ratio(7, 2)).unwrap();
        assert_eq!(c.verdict, VerdictKind::RationalSqrt { root: ratio(1, 2) });
        assert!(!c.conditional_on_conjecture);

        assert_eq!(classify(10, &ratio(3, 1)), Err(Error::NotAboveSqrtR("3".into())));
        assert_eq!(classify(9, &int(4)), Err(Error::UnsupportedR(9)));
    }

    #[test]
    fn classification_serializes() {
        let json = serde_json::to_value(classify(10, &ratio(16, 5)).unwrap()).unwrap();
        assert_eq!(json["mu"], "16/5");
        assert_eq!(json["mu0"], "77/24");
        assert_eq!(json["verdict"]["kind"], "ConditionallyIrrational");
        assert_eq!(json["self_intersection"], "6/25");
    }
}

//! Balanced and critical pairs for `r >= 10`, the discriminant test that rules each
//! one out, and an exhaustive oracle used to cross-check the enumeration.

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::int;
use crate::exact::{QuadraticNumber, Rational};
use crate::surface::{binom2, CurveClass};

fn require_r(r: usize) -> Result<()> {
    if r < 10 {
        Err(Error::UnsupportedR(r as i64))
    } else {
        Ok(())
    }
}

/// Right-hand side of the dimension inequality: `max{C(t+1,2) - 2, 0}`.
pub fn singularity_conditions(t: i64) -> i64 {
    (binom2(t + 1) - 2).max(0)
}

/// A balanced class `(d; m^s, (m-1)^(r-s))` with a point multiplicity `t < d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BalancedPair {
    pub t: i64,
    pub d: i64,
    pub m: i64,
    pub s: i64,
    pub r: i64,
}

impl BalancedPair {
    /// The balanced pair with total multiplicity `total >= 1`:
    /// `m = floor((total-1)/r) + 1` and `s = total - (m-1) r`, so `1 <= s <= r`.
    pub fn from_total(d: i64, total: i64, r: usize, t: i64) -> Result<Self> {
        if t < 1 || t >= d {
            return Err(Error::InvalidT { t, d });
        }
        if total < 1 {
            return Err(Error::InvalidClass(format!("total multiplicity {total}")));
        }
        let r = r as i64;
        let m = (total - 1) / r + 1;
        let s = total - (m - 1) * r;
        Ok(Self { t, d, m, s, r })
    }

    /// `M = s m + (r-s)(m-1)`.
    pub fn total_multiplicity(&self) -> i64 {
        self.s * self.m + (self.r - self.s) * (self.m - 1)
    }

    pub fn average_multiplicity(&self) -> Rational {
        Rational::new(self.total_multiplicity().into(), self.r.into())
    }

    pub fn class(&self) -> CurveClass {
        CurveClass::from_runs(
            self.d,
            &[
                (self.m, self.s as usize),
                (self.m - 1, (self.r - self.s) as usize),
            ],
            self.r as usize,
        )
        .expect("balanced classes are interior")
    }

    /// `Delta = M^2 - r(d^2 - t^2)`.
    pub fn delta(&self) -> i64 {
        let total = self.total_multiplicity();
        total * total - self.r * (self.d * self.d - self.t * self.t)
    }
}

/// Closed form of `sum C(m_i+1, 2)` for the balanced class of total `total`.
fn balanced_conditions(total: i64, r: i64) -> i64 {
    if total == 0 {
        return 0;
    }
    let m = (total - 1) / r + 1;
    let s = total - (m - 1) * r;
    s * binom2(m + 1) + (r - s) * binom2(m)
}

fn balanced_edim(d: i64, total: i64, r: i64, t: i64) -> bool {
    binom2(d + 2) - balanced_conditions(total, r) > singularity_conditions(t)
}

/// `C(d+2,2) - sum C(m_i+1,2) > max{C(t+1,2) - 2, 0}`.
pub fn edim_condition(c: &CurveClass, t: i64) -> Result<bool> {
    if c.is_exceptional() {
        return Err(Error::ExceptionalClassUnsupported);
    }
    Ok(c.conditions_margin() > singularity_conditions(t))
}

/// Admissible point multiplicities for a potential counterexample.
pub fn t_range(r: usize) -> Result<RangeInclusive<i64>> {
    require_r(r)?;
    Ok(match r {
        10 => 1..=5,
        11 => 1..=4,
        12 => 1..=3,
        _ => 1..=2,
    })
}

/// Largest integer `M` with `M <= 25 r / (4r - 12 sqrt r)`, decided exactly.
pub fn total_multiplicity_bound(r: usize) -> Result<i64> {
    require_r(r)?;
    let ri = r as i64;
    let sqrt_r = QuadraticNumber::sqrt_int(r as u64);
    // M (4r - 12 sqrt r) <= 25 r
    let fits = |total: i64| {
        let lhs = sqrt_r
            .scale(&int(-12 * total))
            .add_rational(&int(4 * ri * total - 25 * ri));
        lhs.signum() != Ordering::Greater
    };
    let mut hi = 1i64;
    while fits(hi) {
        hi *= 2;
    }
    let mut lo = 0i64;
    // invariant: fits(lo) && !fits(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The largest `M >= 0` for which the balanced class of degree `d` satisfies the
/// dimension inequality at `t`.
fn max_total(d: i64, t: i64, r: i64) -> i64 {
    // sum C(m_i+1,2) >= M, so M < C(d+2,2) always.
    let (mut lo, mut hi) = (0i64, binom2(d + 2));
    debug_assert!(balanced_edim(d, lo, r, t));
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if balanced_edim(d, mid, r, t) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The unique critical pair of degree `d` and multiplicity index `t`, if any.
pub fn critical_pair_for(d: i64, t: i64, r: usize) -> Result<Option<BalancedPair>> {
    if t < 1 || t >= d {
        return Err(Error::InvalidT { t, d });
    }
    let ri = r as i64;
    let total = max_total(d, t, ri);
    if total < 1 {
        return Ok(None);
    }
    if t < d - 1 && balanced_edim(d, total, ri, t + 1) {
        return Ok(None);
    }
    BalancedPair::from_total(d, total, r, t).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    PassNegativeDelta,
    PassMuMinusAboveThreshold,
    Counterexample,
}

impl Outcome {
    pub fn passes(self) -> bool {
        self != Outcome::Counterexample
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub delta: i64,
    pub mu_minus: Option<QuadraticNumber>,
    pub outcome: Outcome,
}

/// `mu_- = (dM - t sqrt(Delta)) / (d^2 - t^2)`, defined for `Delta >= 0`.
pub fn mu_minus(p: &BalancedPair) -> Option<QuadraticNumber> {
    let delta = p.delta();
    if delta < 0 {
        return None;
    }
    let lead = p.d * p.d - p.t * p.t;
    let centre = Rational::new((p.d * p.total_multiplicity()).into(), lead.into());
    Some(
        QuadraticNumber::sqrt_int(delta as u64)
            .scale(&Rational::new((-p.t).into(), lead.into()))
            .add_rational(&centre),
    )
}

/// The pair cannot satisfy the rationality inequality below `mu0` when `Delta < 0` or
/// `mu_- >= mu0`.
pub fn check_pair(p: &BalancedPair, mu0: &QuadraticNumber) -> Verdict {
    let delta = p.delta();
    match mu_minus(p) {
        None => Verdict {
            delta,
            mu_minus: None,
            outcome: Outcome::PassNegativeDelta,
        },
        Some(root) => {
            let outcome = if root.compare(mu0) != Ordering::Less {
                Outcome::PassMuMinusAboveThreshold
            } else {
                Outcome::Counterexample
            };
            Verdict {
                delta,
                mu_minus: Some(root),
                outcome,
            }
        }
    }
}

/// All critical pairs whose total multiplicity respects the bound, sorted by `(t, d)`.
///
/// For each `t` the degree increases until the maximal admissible `M` exceeds the
/// bound. That maximum must be nondecreasing in `d` for the stop to be sound, and
/// this is checked at every step.
pub fn enumerate_critical_pairs(r: usize) -> Result<Vec<BalancedPair>> {
    let bound = total_multiplicity_bound(r)?;
    let ri = r as i64;
    let mut pairs = Vec::new();
    for t in t_range(r)? {
        let mut previous = -1;
        for d in (t + 1).. {
            let total = max_total(d, t, ri);
            if total < previous {
                return Err(Error::MonotonicityViolated(format!(
                    "r = {r}, t = {t}: max M drops from {previous} to {total} at d = {d}"
                )));
            }
            previous = total;
            if total > bound {
                break;
            }
            if let Some(p) = critical_pair_for(d, t, r)? {
                pairs.push(p);
            }
        }
    }
    pairs.sort();
    Ok(pairs)
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub r: usize,
    pub mu0: QuadraticNumber,
    pub pairs: Vec<(BalancedPair, Verdict)>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &(BalancedPair, Verdict)> {
        self.pairs.iter().filter(|(_, v)| !v.outcome.passes())
    }
}

/// Runs the discriminant test on every enumerated critical pair.
pub fn verify_no_counterexample(r: usize, mu0: &QuadraticNumber) -> Result<VerificationReport> {
    let pairs: Vec<_> = enumerate_critical_pairs(r)?
        .into_iter()
        .map(|p| {
            let v = check_pair(&p, mu0);
            (p, v)
        })
        .collect();
    let all_pass = pairs.iter().all(|(_, v)| v.outcome.passes());
    Ok(VerificationReport {
        r,
        mu0: mu0.clone(),
        pairs,
        all_pass,
    })
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub r: usize,
    /// Largest degree examined; beyond it no pair is critical and every `Delta < 0`.
    pub degree_limit: i64,
    pub pairs_checked: usize,
    pub counterexamples: Vec<(BalancedPair, Verdict)>,
    pub critical: Vec<BalancedPair>,
    pub matches_enumeration: bool,
}

fn explicit_edim(c: &CurveClass, t: i64) -> bool {
    c.conditions_margin() > singularity_conditions(t)
}

/// Exhaustive check over every balanced pair with `1 <= M <= bound` and
/// `t <= max t_range(r)`.
///
/// Works on explicit multiplicity vectors rather than the closed forms used by
/// [`enumerate_critical_pairs`]. The degree range is cut off at the first `d` past
/// which (a) raising the smallest multiplicity of any class with `M <= bound` keeps the
/// dimension inequality true, so nothing is critical, and (b) `Delta < 0` for all
/// `M <= bound`.
pub fn brute_force_oracle(r: usize, mu0: &QuadraticNumber) -> Result<OracleReport> {
    let bound = total_multiplicity_bound(r)?;
    let t_max = *t_range(r)?.end();
    let ri = r as i64;

    let widest_conditions = BalancedPair::from_total(t_max + 1, bound + 1, r, t_max)?
        .class()
        .conditions();
    let mut degree_limit = 2;
    while binom2(degree_limit + 3) - widest_conditions <= singularity_conditions(t_max)
        || bound * bound >= ri * ((degree_limit + 1).pow(2) - t_max * t_max)
    {
        degree_limit += 1;
    }

    let cells: Vec<(i64, i64)> = (1..=t_max)
        .flat_map(|t| ((t + 1)..=degree_limit).map(move |d| (t, d)))
        .collect();
    // (pairs checked, counterexamples, critical pairs) per cell
    type Cell = (usize, Vec<(BalancedPair, Verdict)>, Vec<BalancedPair>);
    let results: Vec<Cell> = cells
        .par_iter()
        .map(|&(t, d)| {
            let mut checked = 0;
            let mut bad = Vec::new();
            let mut critical = Vec::new();
            for total in 1..=bound {
                let pair = BalancedPair::from_total(d, total, r, t).expect("t < d, M >= 1");
                let class = pair.class();
                if !explicit_edim(&class, t) {
                    continue;
                }
                checked += 1;
                let verdict = check_pair(&pair, mu0);
                if !verdict.outcome.passes() {
                    bad.push((pair.clone(), verdict));
                }
                let mut raised = class.mults().to_vec();
                *raised.last_mut().expect("r >= 10") += 1;
                let raised = CurveClass::new(d, raised).expect("interior");
                let m_critical = !explicit_edim(&raised, t);
                let t_critical = t == d - 1 || !explicit_edim(&class, t + 1);
                if m_critical && t_critical {
                    critical.push(pair);
                }
            }
            (checked, bad, critical)
        })
        .collect();

    let mut pairs_checked = 0;
    let mut counterexamples = Vec::new();
    let mut critical = Vec::new();
    for (n, bad, crit) in results {
        pairs_checked += n;
        counterexamples.extend(bad);
        critical.extend(crit);
    }
    counterexamples.sort_by(|a, b| a.0.cmp(&b.0));
    critical.sort();
    let matches_enumeration = critical == enumerate_critical_pairs(r)?;
    Ok(OracleReport {
        r,
        degree_limit,
        pairs_checked,
        counterexamples,
        critical,
        matches_enumeration,
    })
}

/// One row of a pair report, in the column order C, t, M, Delta, mu_-.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub class: String,
    pub t: i64,
    #[serde(rename = "M")]
    pub total: i64,
    pub delta: i64,
    pub mu_minus: Option<String>,
    pub outcome: Outcome,
}

impl PairRecord {
    pub fn new(p: &BalancedPair, v: &Verdict) -> Self {
        Self {
            class: p.class().to_string(),
            t: p.t,
            total: p.total_multiplicity(),
            delta: v.delta,
            mu_minus: v.mu_minus.as_ref().map(|m| m.to_string()),
            outcome: v.outcome,
        }
    }
}

//! Rigorous bounds on the region of `(average multiplicity, t)` pairs that a
//! counterexample could occupy.
//!
//! For a fixed `t`, the quadratic
//!
//! ```text
//! Q(m, t) = (r^2/mu^2 - r) m^2 + (2 r t rho/mu^2 + 3r/mu - r) m
//!           - r t^2/mu^2 + (3 rho/mu - 1) t + 6,        rho = sqrt(mu^2 - r)
//! ```
//!
//! is evaluated coefficient-wise in `m` over intervals of `mu`, and bisection over
//! `mu in [sqrt r, sqrt(r+1)]` proves `Q(m, t0) < 0` for every `m >= 0`.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{int, pow2_neg, ratio, serde_str};
use crate::exact::{interval_eval, sqrt_enclosure, Expr, QuadraticNumber, Rational, RationalInterval};
use crate::search::total_multiplicity_bound;

/// Enclosures of `mu`, `mu^2` and `rho = sqrt(mu^2 - r)` over a set of `mu` values.
#[derive(Clone, Debug)]
pub struct MuBox {
    r: i64,
    mu: RationalInterval,
    mu_sq: RationalInterval,
    rho: RationalInterval,
}

impl MuBox {
    /// Plain enclosure over `mu in [lo, hi]`, `lo > 0`. The radicand `mu^2 - r` is
    /// clamped at zero.
    pub fn new(r: i64, mu: &RationalInterval, width: &Rational) -> Result<Self> {
        if !mu.is_strictly_positive() {
            return Err(Error::DivisionByZeroInterval(mu.to_string()));
        }
        let mu_sq = mu.square();
        let rho = mu_sq.shift(&int(-r)).sqrt(width)?;
        Ok(Self {
            r,
            mu: mu.clone(),
            mu_sq,
            rho,
        })
    }

    /// Enclosure over `mu in [lo, hi]` intersected with `[sqrt r, sqrt(r+1)]`: the
    /// square is clamped to `[r, r+1]` exactly. `None` if the intersection is empty.
    pub fn band(r: i64, mu: &RationalInterval, width: &Rational) -> Result<Option<Self>> {
        if !mu.is_strictly_positive() {
            return Err(Error::DivisionByZeroInterval(mu.to_string()));
        }
        let Some(mu_sq) = mu.square().intersect(&RationalInterval::new(int(r), int(r + 1))) else {
            return Ok(None);
        };
        let rho = mu_sq.shift(&int(-r)).sqrt(width)?;
        Ok(Some(Self {
            r,
            mu: mu.clone(),
            mu_sq,
            rho,
        }))
    }

    /// `mu = sqrt(mu_sq)` for an exact rational square, e.g. `mu_sq = r` puts `mu` at
    /// `sqrt r` with `rho = 0` exactly.
    pub fn pinned(r: i64, mu_sq: &Rational, width: &Rational) -> Result<Self> {
        let mu = sqrt_enclosure(mu_sq, width)?;
        let radicand = mu_sq - int(r);
        if radicand.is_negative() {
            return Err(Error::NegativeRadicand(radicand.to_string()));
        }
        Ok(Self {
            r,
            mu,
            mu_sq: RationalInterval::point(mu_sq.clone()),
            rho: sqrt_enclosure(&radicand, width)?,
        })
    }

    pub fn mu(&self) -> &RationalInterval {
        &self.mu
    }

    pub fn mu_sq(&self) -> &RationalInterval {
        &self.mu_sq
    }

    pub fn rho(&self) -> &RationalInterval {
        &self.rho
    }

    fn inv(&self) -> RationalInterval {
        self.mu.recip().expect("mu > 0")
    }

    fn inv_sq(&self) -> RationalInterval {
        self.mu_sq.recip().expect("mu^2 > 0")
    }
}

/// Interval coefficients of `Q(m, t) = a m^2 + b m + c` for fixed `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QEvaluation {
    pub a: RationalInterval,
    pub b: RationalInterval,
    pub c: RationalInterval,
    pub r: i64,
    #[serde(with = "serde_str")]
    pub t: Rational,
}

impl QEvaluation {
    pub fn at(&self, m_bar: &Rational) -> RationalInterval {
        let m = RationalInterval::point(m_bar.clone());
        &(&self.a * &m.square()) + &(&(&self.b * &m) + &self.c)
    }

    /// Upper enclosure of `c - b^2/(4a)`, the maximum over all real `m`, when `a < 0`.
    pub fn peak(&self) -> Option<RationalInterval> {
        if !self.a.is_strictly_negative() {
            return None;
        }
        let denom = (-&self.a).scale(&int(4));
        Some(&self.c + &self.b.square().checked_div(&denom).ok()?)
    }
}

pub fn q_coefficients(t: &Rational, mu: &MuBox) -> QEvaluation {
    let r = int(mu.r);
    let inv = mu.inv();
    let inv_sq = mu.inv_sq();
    let a = inv_sq.scale(&(&r * &r)).shift(&-&r);
    let b = &(&mu.rho * &inv_sq).scale(&(int(2) * &r * t)) + &inv.scale(&(int(3) * &r)).shift(&-&r);
    let c =
        (&inv_sq.scale(&(-&r * t * t)) + &(&mu.rho * &inv).scale(&(int(3) * t)).shift(&-t)).shift(&int(6));
    QEvaluation {
        a,
        b,
        c,
        r: mu.r,
        t: t.clone(),
    }
}

fn default_width() -> Rational {
    pow2_neg(crate::exact::DEFAULT_SQRT_WIDTH_EXPONENT)
}

/// Enclosure of `Q(m_bar, t)` over the `mu`-interval.
pub fn q_value(m_bar: &Rational, t: &Rational, r: i64, mu: &RationalInterval) -> Result<RationalInterval> {
    let mu = MuBox::new(r, mu, &default_width())?;
    Ok(q_value_in(m_bar, t, &mu))
}

pub fn q_value_in(m_bar: &Rational, t: &Rational, mu: &MuBox) -> RationalInterval {
    q_coefficients(t, mu).at(m_bar)
}

fn linear_parts(mu: &MuBox) -> (RationalInterval, RationalInterval) {
    let r = int(mu.r);
    // slope: 4r^2 - 12 r mu + 4 r rho ; offset: 15 r + 10 mu^2 - 6 mu rho
    let slope = &mu.mu.scale(&(int(-12) * &r)) + &mu.rho.scale(&(int(4) * &r));
    let slope = slope.shift(&(int(4) * &r * &r));
    let offset = &mu.mu_sq.scale(&int(10)) + &(&mu.mu * &mu.rho).scale(&int(-6));
    let offset = offset.shift(&(int(15) * &r));
    (slope, offset)
}

/// Discriminant of `Q(m_bar, t)` as a polynomial in `t`:
/// `(-(4r^2 - 12 r mu + 4 r rho) m_bar + (15 r + 10 mu^2 - 6 mu rho)) / mu^2`.
pub fn discriminant_t(m_bar: &Rational, r: i64, mu: &RationalInterval) -> Result<RationalInterval> {
    let mu = MuBox::new(r, mu, &default_width())?;
    Ok(discriminant_t_in(m_bar, &mu))
}

pub fn discriminant_t_in(m_bar: &Rational, mu: &MuBox) -> RationalInterval {
    let (slope, offset) = linear_parts(mu);
    &(&slope.scale(&-m_bar) + &offset) * &mu.inv_sq()
}

/// `m_bar_0(mu) = (15 r + 10 mu^2 - 6 mu rho) / (4 r^2 - 12 r mu + 4 r rho)`, where the
/// parabola `Q = 0` touches its vertical tangent.
pub fn m_bar_zero(r: i64, mu: &RationalInterval) -> Result<RationalInterval> {
    let mu = MuBox::new(r, mu, &default_width())?;
    m_bar_zero_in(&mu)
}

pub fn m_bar_zero_in(mu: &MuBox) -> Result<RationalInterval> {
    let (slope, offset) = linear_parts(mu);
    offset.checked_div(&slope)
}

/// Discriminant of the degree-two part of `Q` in `(m, t)`; identically zero.
pub fn homogeneous_discriminant(mu: &MuBox) -> RationalInterval {
    let r = int(mu.r);
    let inv_sq = mu.inv_sq();
    let cross = (&mu.rho * &inv_sq).scale(&(int(2) * &r));
    let a = inv_sq.scale(&(&r * &r)).shift(&-&r);
    &cross.square() + &(&a * &inv_sq).scale(&(int(4) * &r))
}

/// Bisection settings shared by every certifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchConfig {
    pub max_depth: u32,
    pub sqrt_width_exponent: u32,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self {
            max_depth: 40,
            sqrt_width_exponent: crate::exact::DEFAULT_SQRT_WIDTH_EXPONENT,
        }
    }
}

impl BranchConfig {
    pub fn width(&self) -> Rational {
        pow2_neg(self.sqrt_width_exponent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafRule {
    /// `a <= 0`, `b <= 0`, `c < 0`: every term is nonpositive and the constant negative.
    CNegative,
    /// `a < 0` and `c - b^2/(4a) < 0`: the maximum over all real `m` is negative.
    VertexNegative,
    /// `mu^2` misses `[r, r+1]` on the whole interval.
    OutsideBand,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub a: RationalInterval,
    pub b: RationalInterval,
    pub c: RationalInterval,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub peak: Option<RationalInterval>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertNode {
    #[serde(with = "serde_str")]
    pub mu_lo: Rational,
    #[serde(with = "serde_str")]
    pub mu_hi: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rule: Option<LeafRule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witnesses: Option<Witnesses>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub children: Vec<CertNode>,
}

impl CertNode {
    pub fn leaves(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(CertNode::leaves).sum()
        }
    }

    pub fn depth(&self) -> u32 {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }
}

/// Proof that `Q(m, t0) < 0` for all `m >= 0` and `mu in [sqrt r, sqrt(r+1)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub r: i64,
    pub t0: i64,
    pub sqrt_width_exponent: u32,
    pub max_depth: u32,
    pub root: CertNode,
}

/// A point of the band where `Q(m_bar, t0) > 0` is proved by a strictly positive
/// enclosure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub r: i64,
    pub t0: i64,
    #[serde(with = "serde_str")]
    pub mu: Rational,
    #[serde(with = "serde_str")]
    pub m_bar: Rational,
    pub q: RationalInterval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TBoundOutcome {
    Certified(Certificate),
    Refuted(Refutation),
}

/// Outer rational enclosure of `[sqrt r, sqrt(r+1)]`.
pub fn band_enclosure(r: i64, width: &Rational) -> Result<RationalInterval> {
    let lo = sqrt_enclosure(&int(r), width)?;
    let hi = sqrt_enclosure(&int(r + 1), width)?;
    Ok(RationalInterval::new(lo.lo().clone(), hi.hi().clone()))
}

fn classify_leaf(q: &QEvaluation) -> Option<(LeafRule, Witnesses)> {
    let witnesses = |peak| Witnesses {
        a: q.a.clone(),
        b: q.b.clone(),
        c: q.c.clone(),
        peak,
    };
    let a_nonpositive = !q.a.hi().is_positive();
    if a_nonpositive && !q.b.hi().is_positive() && q.c.is_strictly_negative() {
        return Some((LeafRule::CNegative, witnesses(None)));
    }
    if q.c.is_strictly_negative() {
        if let Some(peak) = q.peak() {
            if peak.is_strictly_negative() {
                return Some((LeafRule::VertexNegative, witnesses(Some(peak))));
            }
        }
    }
    None
}

/// Tries to show `Q(m_bar, t0) > 0` at a rational point of `interval` inside the band.
fn refute_at(r: i64, t0: &Rational, interval: &RationalInterval) -> Option<Refutation> {
    let mu = interval.midpoint();
    let mu_sq = &mu * &mu;
    if mu_sq < int(r) || mu_sq > int(r + 1) {
        return None;
    }
    let fine = pow2_neg(64);
    let point = MuBox::new(r, &RationalInterval::point(mu.clone()), &fine).ok()?;
    let q = q_coefficients(t0, &point);
    let vertex = if q.a.midpoint().is_negative() {
        -q.b.midpoint() / (int(2) * q.a.midpoint())
    } else {
        Rational::zero()
    };
    let vertex = if vertex.is_negative() {
        Rational::zero()
    } else {
        vertex
    };
    let scale = Rational::from_integer(1024.into());
    let m_bar = (&vertex * &scale).floor() / &scale;
    let value = q.at(&m_bar);
    value.is_strictly_positive().then(|| Refutation {
        r,
        t0: t0.to_integer().try_into().unwrap_or(0),
        mu,
        m_bar,
        q: value,
    })
}

enum Branch {
    Done(CertNode),
    Refuted(Refutation),
    TooDeep,
}

fn certify_node(r: i64, t0: &Rational, interval: RationalInterval, depth: u32, cfg: &BranchConfig) -> Branch {
    let width = cfg.width();
    let leaf = |rule, witnesses| CertNode {
        mu_lo: interval.lo().clone(),
        mu_hi: interval.hi().clone(),
        rule: Some(rule),
        witnesses: Some(witnesses),
        children: Vec::new(),
    };
    match MuBox::band(r, &interval, &width) {
        Ok(Some(mu)) => {
            if let Some((rule, w)) = classify_leaf(&q_coefficients(t0, &mu)) {
                return Branch::Done(leaf(rule, w));
            }
        }
        Ok(None) => {
            return Branch::Done(CertNode {
                mu_lo: interval.lo().clone(),
                mu_hi: interval.hi().clone(),
                rule: Some(LeafRule::OutsideBand),
                witnesses: None,
                children: Vec::new(),
            })
        }
        Err(_) => return Branch::TooDeep,
    }
    if let Some(refutation) = refute_at(r, t0, &interval) {
        return Branch::Refuted(refutation);
    }
    if depth >= cfg.max_depth {
        return Branch::TooDeep;
    }
    let (left, right) = interval.bisect();
    let (lb, rb) = rayon::join(
        || certify_node(r, t0, left, depth + 1, cfg),
        || certify_node(r, t0, right, depth + 1, cfg),
    );
    match (lb, rb) {
        (Branch::Refuted(x), _) | (_, Branch::Refuted(x)) => Branch::Refuted(x),
        (Branch::Done(a), Branch::Done(b)) => Branch::Done(CertNode {
            mu_lo: interval.lo().clone(),
            mu_hi: interval.hi().clone(),
            rule: None,
            witnesses: None,
            children: vec![a, b],
        }),
        _ => Branch::TooDeep,
    }
}

/// Certifies `Q(m, t0) < 0` for all `m >= 0` and `mu in [sqrt r, sqrt(r+1)]`, or
/// exhibits a point where `Q > 0`.
pub fn verify_t_bound(r: i64, t0: i64, cfg: &BranchConfig) -> Result<TBoundOutcome> {
    if r < 10 {
        return Err(Error::UnsupportedR(r));
    }
    if t0 < 2 {
        return Err(Error::InvalidT0(t0));
    }
    let t = int(t0);
    let band = band_enclosure(r, &cfg.width())?;
    match certify_node(r, &t, band, 0, cfg) {
        Branch::Done(root) => Ok(TBoundOutcome::Certified(Certificate {
            r,
            t0,
            sqrt_width_exponent: cfg.sqrt_width_exponent,
            max_depth: cfg.max_depth,
            root,
        })),
        Branch::Refuted(x) => Ok(TBoundOutcome::Refuted(x)),
        Branch::TooDeep => Err(Error::DepthLimitExceeded(cfg.max_depth)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub r: i64,
    pub t0: i64,
    pub leaves: usize,
    pub depth: u32,
    pub valid: bool,
    pub problems: Vec<String>,
}

/// The leaf coefficients written as expression trees over `mu`, `nu = mu^2`.
fn audit_exprs(r: i64, t0: i64) -> [Expr; 4] {
    let (r, t) = (Expr::int(r), Expr::int(t0));
    let mu = || Expr::var("mu");
    let nu = || Expr::var("nu");
    let rho = || (nu() - r.clone()).sqrt();
    let a = r.clone() * r.clone() / nu() - r.clone();
    let b = Expr::int(2) * r.clone() * t.clone() * rho() / nu() + Expr::int(3) * r.clone() / mu() - r.clone();
    let c = -(r.clone() * t.clone() * t.clone() / nu())
        + (Expr::int(3) * rho() / mu() - Expr::int(1)) * t
        + Expr::int(6);
    let peak = c.clone() + b.clone().square() / (Expr::int(-4) * a.clone());
    [a, b, c, peak]
}

/// Re-checks a certificate from scratch: the tree must tile an enclosure of
/// `[sqrt r, sqrt(r+1)]`, and every leaf rule must hold for coefficients recomputed
/// through the generic expression evaluator.
pub fn audit_certificate(cert: &Certificate) -> Result<AuditReport> {
    let mut problems = Vec::new();
    let (r, t0) = (cert.r, cert.t0);
    let root = &cert.root;
    if &root.mu_lo * &root.mu_lo > int(r) {
        problems.push(format!("root starts at {} above sqrt({r})", root.mu_lo));
    }
    if &root.mu_hi * &root.mu_hi < int(r + 1) {
        problems.push(format!("root ends at {} below sqrt({})", root.mu_hi, r + 1));
    }
    if !root.mu_lo.is_positive() {
        problems.push("root interval must be positive".into());
    }
    let exprs = audit_exprs(r, t0);
    let width = pow2_neg(cert.sqrt_width_exponent);
    let mut leaves = 0;
    let mut stack = vec![(root, 0u32)];
    while let Some((node, depth)) = stack.pop() {
        let here = format!("[{}, {}]", node.mu_lo, node.mu_hi);
        if node.mu_lo > node.mu_hi {
            problems.push(format!("{here}: reversed interval"));
            continue;
        }
        if depth > cert.max_depth {
            problems.push(format!("{here}: depth {depth} exceeds {}", cert.max_depth));
        }
        if !node.children.is_empty() {
            let [left, right] = node.children.as_slice() else {
                problems.push(format!("{here}: expected two children"));
                continue;
            };
            if left.mu_lo != node.mu_lo || left.mu_hi != right.mu_lo || right.mu_hi != node.mu_hi {
                problems.push(format!("{here}: children do not tile the parent"));
            }
            stack.push((left, depth + 1));
            stack.push((right, depth + 1));
            continue;
        }
        leaves += 1;
        let Some(rule) = node.rule else {
            problems.push(format!("{here}: leaf without a rule"));
            continue;
        };
        let mu = RationalInterval::new(node.mu_lo.clone(), node.mu_hi.clone());
        let nu = mu.square().intersect(&RationalInterval::new(int(r), int(r + 1)));
        let Some(nu) = nu else {
            if rule != LeafRule::OutsideBand {
                problems.push(format!("{here}: outside the band but marked {rule:?}"));
            }
            continue;
        };
        let bindings: HashMap<String, RationalInterval> =
            [("mu".to_string(), mu), ("nu".to_string(), nu)].into();
        let eval = |e: &Expr| interval_eval(e, &bindings, &width);
        let (a, b, c) = match (eval(&exprs[0]), eval(&exprs[1]), eval(&exprs[2])) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => {
                problems.push(format!("{here}: coefficient evaluation failed"));
                continue;
            }
        };
        let holds = match rule {
            LeafRule::CNegative => !a.hi().is_positive() && !b.hi().is_positive() && c.is_strictly_negative(),
            LeafRule::VertexNegative => {
                a.is_strictly_negative()
                    && c.is_strictly_negative()
                    && eval(&exprs[3]).map(|p| p.is_strictly_negative()).unwrap_or(false)
            }
            LeafRule::OutsideBand => false,
        };
        if !holds {
            problems.push(format!("{here}: rule {rule:?} does not hold"));
        }
    }
    Ok(AuditReport {
        r,
        t0,
        leaves,
        depth: root.depth(),
        valid: problems.is_empty(),
        problems,
    })
}

/// Certifies `r * m_bar_0(mu) < B + 1` over the band, where `B` is
/// [`total_multiplicity_bound`], along with positivity of the denominator of `m_bar_0`.
/// Returns the number of leaves used.
pub fn verify_multiplicity_bound(r: i64, cfg: &BranchConfig) -> Result<usize> {
    let bound = total_multiplicity_bound(r as usize)?;
    let limit = ratio(bound + 1, r);
    let width = cfg.width();
    let mut stack = vec![(band_enclosure(r, &width)?, 0u32)];
    let mut leaves = 0;
    while let Some((interval, depth)) = stack.pop() {
        let Some(mu) = MuBox::band(r, &interval, &width)? else {
            continue;
        };
        let (slope, _) = linear_parts(&mu);
        let ok = slope.is_strictly_positive() && m_bar_zero_in(&mu).map(|m| m.hi() < &limit).unwrap_or(false);
        if ok {
            leaves += 1;
            continue;
        }
        if depth >= cfg.max_depth {
            return Err(Error::DepthLimitExceeded(cfg.max_depth));
        }
        let (a, b) = interval.bisect();
        stack.push((a, depth + 1));
        stack.push((b, depth + 1));
    }
    Ok(leaves)
}

/// The two coefficients of the linear lower bound for `-Q(m, 3)` once `r >= 20`:
/// `r - 3 sqrt r - 6` and `9r/(r+1) - 9/sqrt r - 3`.
pub fn large_r_coefficients(r: u64) -> (QuadraticNumber, QuadraticNumber) {
    let ri = r as i64;
    let sqrt_r = QuadraticNumber::sqrt_int(r);
    let slope = sqrt_r.scale(&int(-3)).add_rational(&int(ri - 6));
    // 9/sqrt r = (9/r) sqrt r
    let offset = sqrt_r
        .scale(&ratio(-9, ri))
        .add_rational(&(ratio(9 * ri, ri + 1) - int(3)));
    (slope, offset)
}

/// Both [`large_r_coefficients`] are positive, so `Q(m, 3) < 0` for all `m >= 0`.
pub fn verify_large_r(r: i64) -> Result<bool> {
    if r < 20 {
        return Err(Error::UnsupportedR(r));
    }
    let (slope, offset) = large_r_coefficients(r as u64);
    let positive = |x: &QuadraticNumber| x.signum() == std::cmp::Ordering::Greater;
    Ok(positive(&slope) && positive(&offset))
}

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seshadri_core::exact::QuadraticNumber;
use seshadri_core::search::{
    brute_force_oracle, check_pair, critical_pair_for, edim_condition, enumerate_critical_pairs, mu_minus,
    t_range, total_multiplicity_bound, BalancedPair, Outcome,
};
use seshadri_core::surface::{
    is_weakly_submaximal, rationality_quadratic, submaximal_locus, CurveClass, UniformPolarization,
};
use seshadri_core::thresholds::threshold;

#[test]
fn critical_pairs_are_sandwiched() {
    for r in 10..=40usize {
        for p in enumerate_critical_pairs(r).unwrap() {
            let c = p.class();
            assert!(edim_condition(&c, p.t).unwrap(), "{c} t={}", p.t);
            let heavier = BalancedPair::from_total(p.d, p.total_multiplicity() + 1, r, p.t).unwrap();
            assert!(
                !edim_condition(&heavier.class(), p.t).unwrap(),
                "{c} t={} not maximal",
                p.t
            );
            if p.t < p.d - 1 {
                assert!(
                    !edim_condition(&c, p.t + 1).unwrap(),
                    "{c} t={} not maximal in t",
                    p.t
                );
            }
        }
    }
}

#[test]
fn critical_total_is_monotone_in_degree() {
    for r in 10..=60usize {
        let bound = total_multiplicity_bound(r).unwrap();
        for t in t_range(r).unwrap() {
            let mut last = 0;
            let mut d = t + 1;
            // stop once the maximal total passes the bound, as the enumeration does
            loop {
                let m = (1..)
                    .take_while(|&m| {
                        let p = BalancedPair::from_total(d, m, r, t).unwrap();
                        edim_condition(&p.class(), t).unwrap()
                    })
                    .last()
                    .unwrap_or(0);
                assert!(m >= last, "r={r} t={t}: drop at d={d}");
                last = m;
                if m > bound {
                    break;
                }
                d += 1;
            }
        }
    }
}

#[test]
fn enumeration_agrees_with_pointwise_search() {
    for r in [10usize, 12, 15, 25] {
        let listed = enumerate_critical_pairs(r).unwrap();
        let bound = total_multiplicity_bound(r).unwrap();
        for p in &listed {
            assert_eq!(critical_pair_for(p.d, p.t, r).unwrap().as_ref(), Some(p));
            assert!(p.total_multiplicity() <= bound);
        }
    }
}

#[test]
fn verdict_roots_solve_the_rationality_quadratic() {
    for r in 10..=40usize {
        let mu0 = threshold(r as i64).unwrap().mu0;
        for p in enumerate_critical_pairs(r).unwrap() {
            let v = check_pair(&p, &mu0);
            assert_eq!(v.delta, p.delta());
            match (&v.mu_minus, v.delta >= 0) {
                (Some(m), true) => {
                    assert_eq!(
                        rationality_quadratic(&p.class(), p.t, m),
                        QuadraticNumber::integer(0)
                    );
                    assert_eq!(mu_minus(&p).as_ref(), Some(m));
                }
                (None, false) => assert_eq!(v.outcome, Outcome::PassNegativeDelta),
                other => panic!("inconsistent verdict {other:?} for {}", p.class()),
            }
        }
    }
}

fn balanced_edim(d: i64, total: i64, r: usize, t: i64) -> bool {
    let p = BalancedPair::from_total(d, total, r, t).unwrap();
    edim_condition(&p.class(), t).unwrap()
}

/// A rational point of `[lo, hi]` for quadratic endpoints, if the gap is visible at
/// `2^-40`.
fn rational_between(rng: &mut ChaCha8Rng, lo: &QuadraticNumber, hi: &QuadraticNumber) -> Option<BigRational> {
    let width = BigRational::new(1.into(), (1i64 << 40).into());
    let lo = lo.enclose(&width).hi().clone();
    let hi = hi.enclose(&width).lo().clone();
    if lo >= hi {
        return None;
    }
    let u = BigRational::new(rng.gen_range(0..=1000i64).into(), 1000.into());
    Some(&lo + (hi - &lo) * u)
}

#[test]
fn balancing_move_preserves_both_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e5ad);
    let mut satisfied = 0;
    let mut attempts = 0;
    while satisfied < 1000 {
        attempts += 1;
        assert!(attempts < 200_000, "only {satisfied} admissible samples");
        let r = rng.gen_range(3..=14usize);
        let d = rng.gen_range(2..=30i64);
        let t = rng.gen_range(1..d);
        let max_total = (1..)
            .take_while(|&m| balanced_edim(d, m, r, t))
            .last()
            .unwrap_or(0);
        let total = max_total - rng.gen_range(0..=2i64);
        if total <= 0 {
            continue;
        }
        // undo a few balancing moves
        let mut mults = BalancedPair::from_total(d, total, r, t)
            .unwrap()
            .class()
            .mults()
            .to_vec();
        for _ in 0..rng.gen_range(1..=3) {
            let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
            if mults[j] > 0 && mults[i] + 1 < d {
                mults[i] += 1;
                mults[j] -= 1;
            }
        }
        mults.sort_unstable_by(|a, b| b.cmp(a));
        if mults[0] - mults[r - 1] < 2 {
            continue;
        }
        let c = CurveClass::new(d, mults.clone()).unwrap();
        let Ok(Some(locus)) = submaximal_locus(&c, t, r).map(|v| v.into_iter().next()) else {
            continue;
        };
        let Some(mu) = rational_between(&mut rng, &locus.lo, locus.hi.as_ref().unwrap()) else {
            continue;
        };
        let l = UniformPolarization::new(r, QuadraticNumber::rational(mu.clone())).unwrap();
        if !(is_weakly_submaximal(&c, t, &l).unwrap() && edim_condition(&c, t).unwrap()) {
            continue;
        }
        satisfied += 1;
        let mut moved = mults;
        moved[0] -= 1;
        moved[r - 1] += 1;
        let c2 = CurveClass::new(d, moved).unwrap();
        assert!(
            is_weakly_submaximal(&c2, t, &l).unwrap(),
            "{c} -> {c2} at mu={mu}"
        );
        assert!(edim_condition(&c2, t).unwrap(), "{c} -> {c2}");
    }
}

#[test]
fn oracle_matches_enumeration() {
    for r in 10..=19usize {
        let mu0 = threshold(r as i64).unwrap().mu0;
        let report = brute_force_oracle(r, &mu0).unwrap();
        assert!(report.matches_enumeration, "r = {r}");
        assert!(report.counterexamples.is_empty(), "r = {r}");
        let mut by_t: BTreeMap<i64, usize> = BTreeMap::new();
        for p in &report.critical {
            *by_t.entry(p.t).or_default() += 1;
        }
        assert_eq!(
            by_t.keys().copied().collect::<Vec<_>>(),
            t_range(r).unwrap().collect::<Vec<_>>()
        );
    }
}

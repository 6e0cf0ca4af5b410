//! Small expression trees evaluated over rational intervals.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::interval::RationalInterval;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Square(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_owned())
    }

    pub fn constant(x: Rational) -> Self {
        Expr::Const(x)
    }

    pub fn int(n: i64) -> Self {
        Expr::Const(Rational::from_integer(n.into()))
    }

    pub fn square(self) -> Self {
        Expr::Square(Box::new(self))
    }

    pub fn sqrt(self) -> Self {
        Expr::Sqrt(Box::new(self))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $var:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$var(Box::new(self), Box::new(rhs))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Natural interval extension of `expr` over the bindings; square roots use
/// enclosures of width `sqrt_width`.
pub fn interval_eval(
    expr: &Expr,
    bindings: &HashMap<String, RationalInterval>,
    sqrt_width: &Rational,
) -> Result<RationalInterval> {
    let eval = |e: &Expr| interval_eval(e, bindings, sqrt_width);
    Ok(match expr {
        Expr::Const(c) => RationalInterval::point(c.clone()),
        Expr::Var(v) => bindings
            .get(v)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        Expr::Add(a, b) => &eval(a)? + &eval(b)?,
        Expr::Sub(a, b) => &eval(a)? - &eval(b)?,
        Expr::Mul(a, b) => &eval(a)? * &eval(b)?,
        Expr::Div(a, b) => eval(a)?.checked_div(&eval(b)?)?,
        Expr::Neg(a) => -&eval(a)?,
        Expr::Square(a) => eval(a)?.square(),
        Expr::Sqrt(a) => eval(a)?.sqrt(sqrt_width)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{exact_sqrt, int, pow2_neg, ratio};
    use crate::exact::sqrt_enclosure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bind(pairs: &[(&str, RationalInterval)]) -> HashMap<String, RationalInterval> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    /// Point evaluation; `None` when a square root is irrational.
    fn exact_eval(expr: &Expr, point: &HashMap<String, Rational>) -> Option<Rational> {
        let ev = |e: &Expr| exact_eval(e, point);
        Some(match expr {
            Expr::Const(c) => c.clone(),
            Expr::Var(v) => point[v].clone(),
            Expr::Add(a, b) => ev(a)? + ev(b)?,
            Expr::Sub(a, b) => ev(a)? - ev(b)?,
            Expr::Mul(a, b) => ev(a)? * ev(b)?,
            Expr::Div(a, b) => ev(a)? / ev(b)?,
            Expr::Neg(a) => -ev(a)?,
            Expr::Square(a) => {
                let x = ev(a)?;
                &x * &x
            }
            Expr::Sqrt(a) => exact_sqrt(&ev(a)?)?,
        })
    }

    #[test]
    fn shift() {
        let e = Expr::var("x") + Expr::int(1);
        let out = interval_eval(
            &e,
            &bind(&[("x", RationalInterval::new(int(0), int(1)))]),
            &pow2_neg(32),
        );
        assert_eq!(out.unwrap(), RationalInterval::new(int(1), int(2)));
    }

    #[test]
    fn vanishes_at_sqrt_r() {
        let mu = sqrt_enclosure(&int(10), &ratio(1, 100)).unwrap();
        let e = Expr::var("mu").square() - Expr::int(10);
        let out = interval_eval(&e, &bind(&[("mu", mu)]), &pow2_neg(32)).unwrap();
        assert!(out.contains_zero());
    }

    #[test]
    fn q01_near_sqrt_r() {
        // 5 - r/mu^2 + 3 sqrt(mu^2 - r)/mu at mu = sqrt(r) is 5 - 1 + 0
        let mu = sqrt_enclosure(&int(10), &pow2_neg(20)).unwrap();
        let m = || Expr::var("mu");
        let e = Expr::int(5) - Expr::int(10) / m().square()
            + Expr::int(3) * (m().square() - Expr::int(10)).sqrt() / m();
        let out = interval_eval(&e, &bind(&[("mu", mu)]), &pow2_neg(32)).unwrap();
        assert!(out.contains(&int(4)), "{out}");
        assert!(out.width() < ratio(1, 10));
    }

    #[test]
    fn errors() {
        let e = Expr::int(1) / Expr::var("x");
        let b = bind(&[("x", RationalInterval::new(int(-1), int(1)))]);
        assert!(matches!(
            interval_eval(&e, &b, &pow2_neg(8)),
            Err(Error::DivisionByZeroInterval(_))
        ));
        let e = Expr::var("x").sqrt();
        let b = bind(&[("x", RationalInterval::new(int(-2), int(-1)))]);
        assert!(matches!(
            interval_eval(&e, &b, &pow2_neg(8)),
            Err(Error::NegativeRadicandInterval(_))
        ));
        assert!(matches!(
            interval_eval(&Expr::var("y"), &b, &pow2_neg(8)),
            Err(Error::UnboundVariable(_))
        ));
    }

    /// Random points whose square roots are rational land inside the enclosure.
    #[test]
    fn containment_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = || Expr::var("x");
        let y = || Expr::var("y");
        let e = (x() * y() + Expr::int(3)).square() / (y() + Expr::int(1))
            - (x().square() * y().square()).sqrt()
            + -(x() - y()) * Expr::constant(ratio(7, 3));
        let bx = RationalInterval::new(ratio(-3, 2), ratio(5, 2));
        let by = RationalInterval::new(ratio(1, 3), int(4));
        let b = bind(&[("x", bx.clone()), ("y", by.clone())]);
        let out = interval_eval(&e, &b, &pow2_neg(32)).unwrap();
        for _ in 0..1000 {
            let px = bx.lo() + bx.width() * ratio(rng.gen_range(0..=1000), 1000);
            let py = by.lo() + by.width() * ratio(rng.gen_range(0..=1000), 1000);
            let point: HashMap<_, _> = [("x".to_string(), px), ("y".to_string(), py)].into();
            let v = exact_eval(&e, &point).expect("|xy| is rational");
            assert!(out.contains(&v), "{v} not in {out}");
        }
    }
}

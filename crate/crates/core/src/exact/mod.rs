//! Exact arithmetic: rationals, quadratic irrationals, and rational intervals.

pub mod expr;
pub mod interval;
pub mod quadratic;
pub mod rational;

pub use expr::{interval_eval, Expr};
pub use interval::{sqrt_enclosure, RationalInterval};
pub use quadratic::QuadraticNumber;
pub use rational::{parse_rational, Rational};

/// Default width of square-root enclosures, `2^-32`.
pub const DEFAULT_SQRT_WIDTH_EXPONENT: u32 = 32;

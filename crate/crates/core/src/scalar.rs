//! Numeric abstraction for tallies, scores and welfare values.
//!
//! Everything that sums `1/N_a` weights or compares relative approval is
//! written against [`Scalar`], so the same code runs in `f64` for simulations
//! and in exact rationals when a tie has to be decided without rounding.

use std::fmt::Debug;

use num_rational::Rational64;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Nearest representable value. Exact for floats, a best rational
    /// approximation otherwise.
    fn from_f64(x: f64) -> Self;

    fn to_f64(self) -> f64;

    fn exp(self) -> Self;

    /// Slack used when comparing computed values for equality.
    fn tolerance() -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as u64, 1)
    }

    fn approx_eq(self, other: Self) -> bool {
        let diff = if self > other { self - other } else { other - self };
        diff <= Self::tolerance()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn exp(self) -> Self {
        f32::exp(self)
    }
    fn tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        Rational64::new(num as i64, den as i64)
    }

    fn from_f64(x: f64) -> Self {
        Rational64::approximate_float(x).unwrap_or_else(|| Rational64::from_integer(0))
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    // No closed form in the rationals; goes through f64.
    fn exp(self) -> Self {
        <Self as Scalar>::from_f64(Scalar::to_f64(self).exp())
    }

    fn tolerance() -> Self {
        Rational64::from_integer(0)
    }
}

//! Scalar abstraction for the slack comparisons.
//!
//! Degrees and labels are integers; the only non-integral quantity in the
//! repair rules is the slack rate α. Every comparison of the form
//! `d > (1+α)·φ + 1` is evaluated in a [`Scalar`], so the exact rational
//! instantiation never rounds while `f64` stays available for quick
//! experiments.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, ToPrimitive};

use crate::Rational;

pub trait Scalar: Clone + Debug + PartialOrd + Num + FromPrimitive + Send + Sync + 'static {
    fn from_rational(r: &Rational) -> Self;

    /// Smallest integer `>= self`, for nonnegative values.
    fn ceil_u64(&self) -> u64;

    fn from_count(c: u64) -> Self {
        Self::from_u64(c).expect("count representable in scalar")
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        *r.numer() as f64 / *r.denom() as f64
    }

    fn ceil_u64(&self) -> u64 {
        self.ceil().max(0.0) as u64
    }
}

impl Scalar for f32 {
    fn from_rational(r: &Rational) -> Self {
        (*r.numer() as f64 / *r.denom() as f64) as f32
    }

    fn ceil_u64(&self) -> u64 {
        self.ceil().max(0.0) as u64
    }
}

impl Scalar for Ratio<i64> {
    fn from_rational(r: &Rational) -> Self {
        *r
    }

    fn ceil_u64(&self) -> u64 {
        self.ceil().to_integer().max(0) as u64
    }
}

impl Scalar for Ratio<i128> {
    fn from_rational(r: &Rational) -> Self {
        Ratio::new(*r.numer() as i128, *r.denom() as i128)
    }

    fn ceil_u64(&self) -> u64 {
        self.ceil().to_integer().max(0) as u64
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &Rational) -> Self {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }

    fn ceil_u64(&self) -> u64 {
        self.ceil().to_integer().to_u64().unwrap_or(0)
    }
}

/// Precomputed slack factors for one α.
#[derive(Clone, Debug)]
pub struct Slack<S> {
    alpha: S,
    one: S,
    one_plus_alpha: S,
    one_plus_half_alpha: S,
}

impl<S: Scalar> Slack<S> {
    pub fn new(alpha: &Rational) -> Self {
        let alpha = S::from_rational(alpha);
        let one = S::one();
        let two = one.clone() + one.clone();
        Slack {
            one_plus_alpha: one.clone() + alpha.clone(),
            one_plus_half_alpha: one.clone() + alpha.clone() / two,
            one,
            alpha,
        }
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn one_plus_alpha(&self) -> &S {
        &self.one_plus_alpha
    }

    /// `x > (1+α)·y + 1`
    pub fn exceeds_plus_one(&self, x: u64, y: u64) -> bool {
        S::from_count(x) > self.one_plus_alpha.clone() * S::from_count(y) + self.one.clone()
    }

    /// `x >= (1+α/2)·y` with `x > y`; the strict part keeps label-0/degree-0
    /// pairs ineligible.
    pub fn dangerous(&self, x: u64, y: u64) -> bool {
        x > y && S::from_count(x) >= self.one_plus_half_alpha.clone() * S::from_count(y)
    }

    /// `heavy >= (1+α)·(light + 1)`
    pub fn substantially_heavier(&self, heavy: u64, light: u64) -> bool {
        S::from_count(heavy) >= self.one_plus_alpha.clone() * S::from_count(light + 1)
    }

    /// `x <= (1+α)·(y + 1)`
    pub fn within_plus_one(&self, x: u64, y: u64) -> bool {
        S::from_count(x) <= self.one_plus_alpha.clone() * S::from_count(y + 1)
    }

    /// `x <= (1+α)·y + 1`
    pub fn within_affine(&self, x: u64, y: u64) -> bool {
        !self.exceeds_plus_one(x, y)
    }

    /// `(1+α)^power`
    pub fn growth(&self, power: u32) -> S {
        let mut g = self.one.clone();
        for _ in 0..power {
            g = g * self.one_plus_alpha.clone();
        }
        g
    }

    /// `base + coeff·α`
    pub fn additive(&self, base: u64, coeff: u64) -> S {
        S::from_count(base) + S::from_count(coeff) * self.alpha.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_comparisons_at_the_boundary() {
        let s: Slack<Rational> = Slack::new(&Rational::new(1, 8));
        // (9/8)·(7+1) = 9 exactly
        assert!(s.substantially_heavier(9, 7));
        assert!(!s.substantially_heavier(8, 7));
        // (9/8)·8 + 1 = 10
        assert!(!s.exceeds_plus_one(10, 8));
        assert!(s.exceeds_plus_one(11, 8));
        // (17/16)·16 = 17
        assert!(s.dangerous(17, 16));
        assert!(!s.dangerous(16, 16));
        assert!(!s.dangerous(0, 0));
        assert!(s.dangerous(1, 0));
    }

    #[test]
    fn float_and_exact_agree_away_from_ties() {
        let exact: Slack<Rational> = Slack::new(&Rational::new(1, 16));
        let float: Slack<f64> = Slack::new(&Rational::new(1, 16));
        for x in 0..60 {
            for y in 0..60 {
                assert_eq!(exact.dangerous(x, y), float.dangerous(x, y));
                assert_eq!(exact.substantially_heavier(x, y), float.substantially_heavier(x, y));
            }
        }
    }

    #[test]
    fn ceilings() {
        assert_eq!(Rational::new(7, 2).ceil_u64(), 4);
        assert_eq!(Rational::new(4, 1).ceil_u64(), 4);
        assert_eq!(3.2f64.ceil_u64(), 4);
        assert_eq!(BigRational::from_rational(&Rational::new(1, 3)).ceil_u64(), 1);
    }
}

//! Default parameter rules and exact bound helpers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::Rational;

/// `max(1, ⌈ln n⌉)`.
pub fn ceil_ln(n: u32) -> u64 {
    ((n.max(1) as f64).ln().ceil() as u64).max(1)
}

/// α = ε² / (4·⌈ln n⌉).
pub fn default_alpha(n: u32, eps: &Rational) -> Rational {
    eps * eps / Rational::from_integer(4 * ceil_ln(n) as i64)
}

/// ⌈4·rank·ln n / ε²⌉, at least 1.
pub fn default_dup_k(n: u32, eps: &Rational, rank: u32) -> u64 {
    let e = *eps.numer() as f64 / *eps.denom() as f64;
    let k = (4.0 * rank as f64 * (n.max(1) as f64).ln() / (e * e)).ceil();
    (k as u64).max(1)
}

/// ⌈4·ln n / ε²⌉, at least 1.
pub fn default_threshold(n: u32, eps: &Rational) -> u64 {
    default_dup_k(n, eps, 1)
}

/// `⌊C/α⌋`, at least 1: the per-call arc budget of the worst-case rules.
pub fn arc_budget(budget_c: u64, alpha: &Rational) -> u64 {
    let b = budget_c as i128 * *alpha.denom() as i128 / *alpha.numer() as i128;
    (b.max(1)) as u64
}

/// Smallest `j >= 0` with `base^j >= x`, computed exactly. `base > 1`.
pub fn ceil_log(base: &Rational, x: u64) -> u64 {
    assert!(*base > Rational::one(), "logarithm base must exceed 1");
    let num = BigUint::from(*base.numer() as u64);
    let den = BigUint::from(*base.denom() as u64);
    let x = BigUint::from(x);
    let mut lhs = BigUint::one();
    let mut rhs = x;
    let mut j = 0;
    while lhs < rhs {
        lhs *= &num;
        rhs *= &den;
        j += 1;
    }
    j
}

/// Worst-case loop iterations allowed for one update:
/// `(C/α)·(⌈log_{1+α}(μ+1)⌉ + 1)`.
pub fn worst_case_iterations(budget_c: u64, alpha: &Rational, mu: u64) -> u64 {
    let base = Rational::one() + alpha;
    arc_budget(budget_c, alpha) * (ceil_log(&base, mu + 1) + 1)
}

pub fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// A rational strictly below `ln n` (within 2⁻⁴⁰).
pub fn ln_lower_bound(n: u32) -> BigRational {
    let ln = (n.max(1) as f64).ln();
    if ln == 0.0 {
        return BigRational::zero();
    }
    let approx = BigRational::from_float(ln).expect("finite logarithm");
    approx - BigRational::new(BigInt::one(), BigInt::from(1u64 << 40))
}

/// Conservative additive slack `c_add·ln n / (ε·k)`, rounded down.
pub fn additive_slack(c_add: u64, n: u32, eps: &Rational, k: u64) -> BigRational {
    let ln = ln_lower_bound(n);
    let denom = to_big(eps) * BigRational::from_integer(BigInt::from(k));
    let v = BigRational::from_integer(BigInt::from(c_add)) * ln / denom;
    if v < BigRational::zero() {
        BigRational::zero()
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log_matches_repeated_multiplication() {
        let base = Rational::new(9, 8);
        assert_eq!(ceil_log(&base, 0), 0);
        assert_eq!(ceil_log(&base, 1), 0);
        assert_eq!(ceil_log(&base, 2), 6); // (9/8)^5 = 1.80, (9/8)^6 = 2.03
        for x in 1..500u64 {
            let j = ceil_log(&base, x);
            let f = |p: u64| (9f64 / 8.0).powi(p as i32);
            assert!(f(j) >= x as f64 - 1e-9);
            if j > 0 {
                assert!(f(j - 1) < x as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn defaults_at_desk_scale() {
        let eps = Rational::new(1, 4);
        assert_eq!(ceil_ln(12), 3);
        assert_eq!(ceil_ln(1), 1);
        assert_eq!(default_alpha(12, &eps), Rational::new(1, 192));
        // 4·ln 12·16 = 159.03…
        assert_eq!(default_dup_k(12, &eps, 1), 160);
        assert_eq!(default_dup_k(1, &eps, 1), 1);
        assert_eq!(arc_budget(4, &Rational::new(1, 8)), 32);
        assert_eq!(arc_budget(4, &Rational::new(1, 192)), 768);
    }

    #[test]
    fn ln_bound_is_below() {
        for n in 1..100u32 {
            let lb = ln_lower_bound(n);
            let f = BigRational::from_float((n as f64).ln()).unwrap();
            assert!(lb <= f);
        }
    }
}

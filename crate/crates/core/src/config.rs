use std::str::FromStr;

use num_traits::{One, Zero};

use crate::bounds;
use crate::error::{Error, Result};
use crate::Rational;

/// Parameters shared by every maintainer variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub n: u32,
    /// Approximation target ε ∈ (0, 1).
    pub eps: Rational,
    /// Slack rate α ∈ (0, 1).
    pub alpha: Rational,
    /// Loop budget constant C of the worst-case rules.
    pub budget_c: u64,
    /// Duplication count k.
    pub dup_k: u64,
    /// Truncation threshold T, when one is configured.
    pub threshold_t: Option<u64>,
}

impl Config {
    pub const DEFAULT_EPS: (i64, i64) = (1, 4);
    pub const DEFAULT_BUDGET_C: u64 = 4;

    /// Defaults for `n` vertices and ε = 1/4.
    pub fn new(n: u32) -> Self {
        Self::with_eps(n, Rational::new(Self::DEFAULT_EPS.0, Self::DEFAULT_EPS.1))
    }

    /// Defaults derived from `eps`: α = ε²/(4⌈ln n⌉), k = ⌈4 ln n/ε²⌉, C = 4,
    /// no truncation.
    pub fn with_eps(n: u32, eps: Rational) -> Self {
        Config {
            n,
            alpha: bounds::default_alpha(n, &eps),
            dup_k: bounds::default_dup_k(n, &eps, 1),
            budget_c: Self::DEFAULT_BUDGET_C,
            threshold_t: None,
            eps,
        }
    }

    /// Hypergraph defaults: the duplication count scales with the rank.
    pub fn hypergraph(n: u32, rank: u32, eps: Rational) -> Self {
        let mut c = Self::with_eps(n, eps);
        c.dup_k = bounds::default_dup_k(n, &c.eps, rank);
        c
    }

    pub fn alpha(mut self, alpha: Rational) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn budget_c(mut self, c: u64) -> Self {
        self.budget_c = c;
        self
    }

    pub fn dup_k(mut self, k: u64) -> Self {
        self.dup_k = k;
        self
    }

    pub fn threshold(mut self, t: Option<u64>) -> Self {
        self.threshold_t = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let zero = Rational::zero();
        let one = Rational::one();
        if self.n == 0 {
            return Err(Error::Config("vertex count must be at least 1".into()));
        }
        if self.eps <= zero || self.eps >= one {
            return Err(Error::Config(format!("eps must lie in (0,1), got {}", self.eps)));
        }
        if self.alpha <= zero || self.alpha >= one {
            return Err(Error::Config(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if self.budget_c == 0 {
            return Err(Error::Config("budget constant C must be at least 1".into()));
        }
        if self.dup_k == 0 {
            return Err(Error::Config("duplication count k must be at least 1".into()));
        }
        if self.threshold_t == Some(0) {
            return Err(Error::Config("threshold T must be at least 1".into()));
        }
        Ok(())
    }

    /// Per-call arc budget `⌊C/α⌋`.
    pub fn arc_budget(&self) -> u64 {
        bounds::arc_budget(self.budget_c, &self.alpha)
    }
}

/// Parses `p/q`, a decimal such as `0.25`, or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse `{s}` as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p = i64::from_str(p.trim()).map_err(|_| bad())?;
        let q = i64::from_str(q.trim()).map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int = if int.is_empty() || int == "-" {
            0
        } else {
            i64::from_str(int).map_err(|_| bad())?.abs()
        };
        let scale = 10i64.pow(frac.len() as u32);
        let f = i64::from_str(frac).map_err(|_| bad())?;
        let v = Rational::new(int * scale + f, scale);
        return Ok(if neg { -v } else { v });
    }
    i64::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for n in [1, 2, 3, 12, 1000] {
            Config::new(n).validate().unwrap();
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Config::new(3).alpha(Rational::zero()).validate().is_err());
        assert!(Config::with_eps(3, Rational::one()).validate().is_err());
        assert!(Config::new(3).budget_c(0).validate().is_err());
        assert!(Config::new(3).dup_k(0).validate().is_err());
        assert!(Config::new(3).threshold(Some(0)).validate().is_err());
        assert!(Config::new(0).validate().is_err());
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/4").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("3").unwrap(), Rational::from_integer(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("0.").is_err());
    }
}

//! Budgeted repairs on truncated in-degrees `min(d(v), T)`.
//!
//! Work per update is bounded in terms of `T` alone. The orientation is only
//! guaranteed near-optimal while the density stays at most `T`.

use crate::bounds;
use crate::config::Config;
use crate::error::Result;
use crate::invariants::Rule;
use crate::maintainer::Maintainer;
use crate::orientation::{OpStats, Structure};
use crate::scalar::Scalar;
use crate::worstcase::WorstCaseMaintainer;
use crate::{Rational, Vertex};

#[derive(Clone, Debug)]
pub struct ThresholdMaintainer<S: Scalar = Rational> {
    inner: WorstCaseMaintainer<S>,
}

impl<S: Scalar> ThresholdMaintainer<S> {
    /// Uses `config.threshold_t`, or `⌈4 ln n / ε²⌉` when unset.
    pub fn new(config: Config) -> Result<Self> {
        let t = config
            .threshold_t
            .unwrap_or_else(|| bounds::default_threshold(config.n, &config.eps));
        Self::with_threshold(config, t)
    }

    pub fn with_threshold(config: Config, t: u64) -> Result<Self> {
        Ok(ThresholdMaintainer {
            inner: WorstCaseMaintainer::with_cap(config, Some(t))?,
        })
    }

    pub fn threshold(&self) -> u64 {
        self.inner.structure().cap().expect("truncated structure has a cap")
    }

    pub fn truncated_in_degree(&self, v: Vertex) -> u64 {
        self.inner.structure().level(v)
    }

    /// Maximum truncated in-degree.
    pub fn max_truncated(&self) -> u64 {
        self.inner.structure().max_level()
    }
}

impl<S: Scalar> Maintainer for ThresholdMaintainer<S> {
    type Scalar = S;

    fn structure(&self) -> &Structure<S> {
        self.inner.structure()
    }

    fn rule(&self) -> Rule {
        Rule::WorstCase
    }

    fn insert(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.inner.insert(u, v)
    }

    fn delete(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.inner.delete(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn truncation_clamps() {
        let mut m = ThresholdMaintainer::<Rational>::with_threshold(Config::new(2), 10).unwrap();
        let add = |m: &mut ThresholdMaintainer, k: usize| {
            for _ in 0..k {
                m.insert(0, 1).unwrap();
            }
        };
        add(&mut m, 6);
        assert_eq!((m.structure().indeg(0), m.truncated_in_degree(0)), (3, 3));
        add(&mut m, 14);
        assert_eq!((m.structure().indeg(0), m.truncated_in_degree(0)), (10, 10));
        // both endpoints sit at T, so the tie rule sends every new copy to 0
        add(&mut m, 10);
        assert_eq!((m.structure().indeg(0), m.truncated_in_degree(0)), (20, 10));
        assert_eq!(m.threshold(), 10);
        m.check_invariants().unwrap();
    }

    #[test]
    fn rejects_bad_updates() {
        let mut m = ThresholdMaintainer::<Rational>::with_threshold(Config::new(20), 10).unwrap();
        assert_eq!(m.insert(0, 21), Err(Error::VertexOutOfRange { vertex: 21, n: 20 }));
        assert_eq!(m.delete(0, 1), Err(Error::MissingEdge(0, 1)));
        assert!(matches!(
            ThresholdMaintainer::<Rational>::with_threshold(Config::new(3), 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn default_threshold_from_config() {
        let m = ThresholdMaintainer::<Rational>::new(Config::new(12)).unwrap();
        assert_eq!(m.threshold(), 160);
        let m = ThresholdMaintainer::<Rational>::new(Config::new(12).threshold(Some(7))).unwrap();
        assert_eq!(m.threshold(), 7);
    }

    #[test]
    fn labels_never_exceed_threshold() {
        let mut m =
            ThresholdMaintainer::<Rational>::with_threshold(Config::new(6).alpha(Rational::new(1, 8)), 4).unwrap();
        for round in 0..6 {
            for u in 0..6 {
                for v in (u + 1)..6 {
                    if (u + v + round) % 3 != 0 {
                        m.insert(u, v).unwrap();
                        m.check_invariants().unwrap();
                    }
                }
            }
        }
        assert!(m.structure().arcs().all(|a| a.label_head <= 4 && a.label_tail <= 4));
        assert_eq!(m.max_truncated(), 4);
    }
}

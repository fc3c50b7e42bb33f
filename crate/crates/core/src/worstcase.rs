//! Budgeted repairs: each check call touches at most `⌊C/α⌋` arcs and recurses
//! at most once, bounding the work of every single update.

use crate::config::Config;
use crate::error::Result;
use crate::invariants::Rule;
use crate::maintainer::Maintainer;
use crate::orientation::{OpStats, Structure};
use crate::scalar::Scalar;
use crate::{Rational, Vertex};

#[derive(Clone, Debug)]
pub struct WorstCaseMaintainer<S: Scalar = Rational> {
    s: Structure<S>,
    budget: u64,
}

impl<S: Scalar> WorstCaseMaintainer<S> {
    pub fn new(config: Config) -> Result<Self> {
        Self::with_cap(config, None)
    }

    /// Same rules evaluated on levels `min(d, cap)`.
    pub(crate) fn with_cap(config: Config, cap: Option<u64>) -> Result<Self> {
        let budget = config.arc_budget();
        Ok(WorstCaseMaintainer {
            s: Structure::with_cap(config, cap)?,
            budget,
        })
    }

    /// Arcs a single check call may process.
    pub fn budget(&self) -> u64 {
        self.budget
    }

    fn check_inc(&mut self, mut v: Vertex) {
        'call: loop {
            for _ in 0..self.budget {
                let Some((a, label)) = self.s.min_in_label_arc(v) else {
                    return;
                };
                let lv = self.s.level(v);
                if !self.s.slack().dangerous(lv, label) {
                    return;
                }
                self.s.tick();
                let u = a.tail;
                let lu = self.s.level(u);
                if self.s.slack().substantially_heavier(lv, lu) {
                    self.s.flip(a).expect("indexed arc is live");
                    if self.s.level(u) == lu {
                        return;
                    }
                    self.s.descend();
                    v = u;
                    continue 'call;
                }
                self.s.set_arc_labels(a).expect("indexed arc is live");
            }
            return;
        }
    }

    fn check_dec(&mut self, mut u: Vertex) {
        'call: loop {
            for _ in 0..self.budget {
                let Some((a, label)) = self.s.max_out_label_arc(u) else {
                    return;
                };
                let lu = self.s.level(u);
                if !self.s.slack().dangerous(label, lu) {
                    return;
                }
                self.s.tick();
                let v = a.head;
                let lv = self.s.level(v);
                if self.s.slack().substantially_heavier(lv, lu) {
                    self.s.flip(a).expect("indexed arc is live");
                    if self.s.level(v) == lv {
                        return;
                    }
                    self.s.descend();
                    u = v;
                    continue 'call;
                }
                self.s.set_arc_labels(a).expect("indexed arc is live");
            }
            return;
        }
    }
}

impl<S: Scalar> Maintainer for WorstCaseMaintainer<S> {
    type Scalar = S;

    fn structure(&self) -> &Structure<S> {
        &self.s
    }

    fn rule(&self) -> Rule {
        Rule::WorstCase
    }

    fn insert(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.s.check_pair(u, v)?;
        self.s.begin_op();
        let (tail, head) = self.s.insertion_orientation(u, v);
        if self.s.add_copy(tail, head) {
            self.check_inc(head);
        }
        Ok(self.s.end_op())
    }

    fn delete(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.s.check_pair(u, v)?;
        let arc = self.s.deletion_arc(u, v)?;
        self.s.begin_op();
        if self.s.remove_copy(arc)? {
            self.check_dec(arc.head);
        }
        Ok(self.s.end_op())
    }
}

//! Unbudgeted repairs: every violating arc is fixed before an update returns.

use crate::config::Config;
use crate::error::Result;
use crate::invariants::Rule;
use crate::maintainer::Maintainer;
use crate::orientation::{OpStats, Structure};
use crate::scalar::Scalar;
use crate::{Rational, Vertex};

#[derive(Clone, Debug)]
pub struct AmortizedMaintainer<S: Scalar = Rational> {
    s: Structure<S>,
}

impl<S: Scalar> AmortizedMaintainer<S> {
    pub fn new(config: Config) -> Result<Self> {
        Ok(AmortizedMaintainer {
            s: Structure::new(config)?,
        })
    }

    /// Repairs in-arcs of `v` after its in-degree rose, cascading through flips.
    fn check_inc(&mut self, mut v: Vertex) {
        while let Some((a, label)) = self.s.min_in_label_arc(v) {
            if !self.s.slack().exceeds_plus_one(self.s.indeg(v), label) {
                break;
            }
            self.s.tick();
            let u = a.tail;
            if self.s.indeg(u) < self.s.indeg(v) {
                self.s.flip(a).expect("indexed arc is live");
                self.s.descend();
                v = u;
            } else {
                self.s.set_arc_labels(a).expect("indexed arc is live");
            }
        }
    }

    /// Repairs out-arcs of `u` after its in-degree fell, cascading through flips.
    fn check_dec(&mut self, mut u: Vertex) {
        while let Some((a, label)) = self.s.max_out_label_arc(u) {
            if !self.s.slack().exceeds_plus_one(label, self.s.indeg(u)) {
                break;
            }
            self.s.tick();
            let v = a.head;
            if self.s.indeg(u) < self.s.indeg(v) {
                self.s.flip(a).expect("indexed arc is live");
                self.s.descend();
                u = v;
            } else {
                self.s.set_arc_labels(a).expect("indexed arc is live");
            }
        }
    }
}

impl<S: Scalar> Maintainer for AmortizedMaintainer<S> {
    type Scalar = S;

    fn structure(&self) -> &Structure<S> {
        &self.s
    }

    fn rule(&self) -> Rule {
        Rule::Amortized
    }

    fn insert(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.s.check_pair(u, v)?;
        self.s.begin_op();
        let (tail, head) = self.s.insertion_orientation(u, v);
        self.s.add_copy(tail, head);
        self.check_inc(head);
        Ok(self.s.end_op())
    }

    fn delete(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.s.check_pair(u, v)?;
        let arc = self.s.deletion_arc(u, v)?;
        self.s.begin_op();
        self.s.remove_copy(arc)?;
        self.check_dec(arc.head);
        Ok(self.s.end_op())
    }
}

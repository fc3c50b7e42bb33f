//! Exhaustive invariant scans over a [`Structure`].

use std::fmt;

use crate::orientation::{ArcView, Structure};
use crate::scalar::Scalar;
use crate::Vertex;

/// Which label inequalities a structure is expected to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Additive-slack labels: the check-inc/check-dec rules without a budget.
    Amortized,
    /// Multiplicative-slack labels kept by budgeted repairs, in levels.
    WorstCase,
}

impl Rule {
    /// Power of `(1+α)` in the maintained local optimality bound.
    pub fn growth_power(self) -> u32 {
        match self {
            Rule::Amortized => 2,
            Rule::WorstCase => 3,
        }
    }

    /// `(base, coeff)` with additive constant `base + coeff·α`.
    pub fn additive(self) -> (u64, u64) {
        match self {
            Rule::Amortized => (3, 3),
            Rule::WorstCase => (3, 10),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantKind {
    Consistency,
    Order,
    Head,
    Tail,
    LocalOptimality,
    Cap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: InvariantKind,
    pub tail: Vertex,
    pub head: Vertex,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} violated on ({}, {}): {}",
            self.kind, self.tail, self.head, self.detail
        )
    }
}

impl std::error::Error for Violation {}

fn fail(kind: InvariantKind, a: &ArcView, detail: String) -> Result<(), Violation> {
    Err(Violation {
        kind,
        tail: a.tail,
        head: a.head,
        detail,
    })
}

/// Consistency audit followed by the label and local optimality inequalities.
pub fn check<S: Scalar>(s: &Structure<S>, rule: Rule) -> Result<(), Violation> {
    s.check_consistency().map_err(|detail| Violation {
        kind: InvariantKind::Consistency,
        tail: 0,
        head: 0,
        detail,
    })?;
    match rule {
        Rule::Amortized => check_amortized(s),
        Rule::WorstCase => check_worst_case(s),
    }
}

/// `d(v) ≤ (1+α)^g·d(u) + additive` for the rule's constants.
pub fn locally_optimal<S: Scalar>(s: &Structure<S>, rule: Rule, head_level: u64, tail_level: u64) -> bool {
    let slack = s.slack();
    let (base, coeff) = rule.additive();
    let bound = slack.growth(rule.growth_power()) * S::from_count(tail_level) + slack.additive(base, coeff);
    S::from_count(head_level) <= bound
}

/// Order, head and tail inequalities of the unbudgeted rules, in raw in-degrees.
pub fn check_amortized<S: Scalar>(s: &Structure<S>) -> Result<(), Violation> {
    let slack = s.slack();
    for a in s.arcs() {
        let (dt, dh) = (s.indeg(a.tail), s.indeg(a.head));
        if a.label_tail + 1 < a.label_head {
            return fail(
                InvariantKind::Order,
                &a,
                format!("lab_t={} lab_h={}", a.label_tail, a.label_head),
            );
        }
        if !slack.within_affine(dh, a.label_head) {
            return fail(InvariantKind::Head, &a, format!("d_h={} lab_h={}", dh, a.label_head));
        }
        if !slack.within_plus_one(a.label_tail, dt) {
            return fail(InvariantKind::Tail, &a, format!("lab_t={} d_t={}", a.label_tail, dt));
        }
        if !locally_optimal(s, Rule::Amortized, dh, dt) {
            return fail(InvariantKind::LocalOptimality, &a, format!("d_h={dh} d_t={dt}"));
        }
    }
    Ok(())
}

/// Order, head and tail inequalities of the budgeted rules, in levels.
pub fn check_worst_case<S: Scalar>(s: &Structure<S>) -> Result<(), Violation> {
    let slack = s.slack();
    for a in s.arcs() {
        let (lt, lh) = (s.level(a.tail), s.level(a.head));
        if let Some(t) = s.cap() {
            if a.label_tail > t || a.label_head > t {
                return fail(
                    InvariantKind::Cap,
                    &a,
                    format!("labels ({}, {}) above T={t}", a.label_tail, a.label_head),
                );
            }
        }
        if !slack.within_plus_one(a.label_head, a.label_tail) {
            return fail(
                InvariantKind::Order,
                &a,
                format!("lab_t={} lab_h={}", a.label_tail, a.label_head),
            );
        }
        if !slack.within_plus_one(lh, a.label_head) {
            return fail(
                InvariantKind::Head,
                &a,
                format!("level_h={} lab_h={}", lh, a.label_head),
            );
        }
        if !slack.within_plus_one(a.label_tail, lt) {
            return fail(
                InvariantKind::Tail,
                &a,
                format!("lab_t={} level_t={}", a.label_tail, lt),
            );
        }
        if !locally_optimal(s, Rule::WorstCase, lh, lt) {
            return fail(InvariantKind::LocalOptimality, &a, format!("level_h={lh} level_t={lt}"));
        }
    }
    Ok(())
}

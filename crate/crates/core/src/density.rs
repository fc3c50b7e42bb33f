//! Density estimation on top of the orientation maintainers.
//!
//! Every logical edge is inserted as `k` parallel copies, so the maximum
//! in-degree divided by `k` brackets the optimal density from above.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::amortized::AmortizedMaintainer;
use crate::bounds;
use crate::config::Config;
use crate::degree::DegreeTable;
use crate::error::{Error, Result};
use crate::invariants::{Rule, Violation};
use crate::maintainer::Maintainer;
use crate::orientation::{Counters, OpStats, Structure};
use crate::scalar::Scalar;
use crate::threshold::ThresholdMaintainer;
use crate::worstcase::WorstCaseMaintainer;
use crate::{Rational, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Amortized,
    WorstCase,
    /// Truncated duplicated structure backed by an unduplicated worst-case one.
    Combined,
}

/// Integer level thresholds `t_0 = 0`, `t_j = ⌈g·t_{j−1} + β⌉`.
#[derive(Clone, Debug)]
pub struct Thresholds {
    growth: BigRational,
    beta: BigRational,
    values: Vec<u64>,
}

impl Thresholds {
    /// Growth `(1+α)^power`, additive `β = 3 + 10α`.
    pub fn new(alpha: &Rational, power: u32) -> Self {
        let a = bounds::to_big(alpha);
        let one = BigRational::from_integer(BigInt::from(1));
        let mut growth = one.clone();
        for _ in 0..power {
            growth *= &one + &a;
        }
        let beta = BigRational::from_integer(BigInt::from(3)) + BigRational::from_integer(BigInt::from(10)) * a;
        Thresholds {
            growth,
            beta,
            values: vec![0],
        }
    }

    /// Extends the sequence until its last value exceeds `mu`.
    pub fn cover(&mut self, mu: u64) {
        while *self.values.last().expect("t_0 present") <= mu {
            let prev = BigRational::from_integer(BigInt::from(*self.values.last().unwrap()));
            let next = (&self.growth * prev + &self.beta).ceil().to_integer();
            self.values.push(next.to_u64().expect("threshold fits in u64"));
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// `K` with `t_{K−1} <= mu < t_K`; requires `cover(mu)`.
    pub fn top(&self, mu: u64) -> usize {
        self.values.partition_point(|&t| t <= mu)
    }
}

/// Sizes `|S_i|`, `S_i = {v : level(v) >= t_{K−i}}`, for `i = 0..=K`.
pub fn level_set_sizes(degrees: &DegreeTable, cap: Option<u64>, thresholds: &Thresholds) -> Vec<usize> {
    let mu = cap.map_or(degrees.max(), |t| degrees.max().min(t));
    let k = thresholds.top(mu);
    let mut sizes = Vec::with_capacity(k + 1);
    sizes.push(0);
    // levels >= t coincide with degrees >= t because t <= mu <= cap
    let mut d = degrees.max() as i128;
    let mut count = 0;
    for i in 1..=k {
        let t = thresholds.values()[k - i] as i128;
        while d >= t {
            count += degrees.bucket_len(d as u64);
            d -= 1;
        }
        sizes.push(count);
    }
    sizes
}

/// Shortest qualifying prefix of vertices by level: the smallest `i` with
/// `|S_{i+1}| <= (1+ε)|S_i|` selects `S_{i+1}`. Sorted ascending.
pub fn extract(degrees: &DegreeTable, cap: Option<u64>, thresholds: &Thresholds, eps: &Rational) -> Vec<Vertex> {
    let mu = cap.map_or(degrees.max(), |t| degrees.max().min(t));
    if mu == 0 {
        return Vec::new();
    }
    let sizes = level_set_sizes(degrees, cap, thresholds);
    let k = sizes.len() - 1;
    let (p, q) = (*eps.numer() as u128, *eps.denom() as u128);
    let pick = (0..k)
        .find(|&i| sizes[i + 1] as u128 * q <= sizes[i] as u128 * (p + q))
        .map_or(k, |i| i + 1);
    let t = thresholds.values()[k - pick];
    let mut out: Vec<Vertex> = if t == 0 {
        (0..degrees.n()).collect()
    } else {
        (t..=degrees.max()).flat_map(|d| degrees.bucket(d)).collect()
    };
    out.sort_unstable();
    out
}

#[derive(Clone, Debug)]
enum Engine<S: Scalar> {
    Amortized(AmortizedMaintainer<S>),
    WorstCase(WorstCaseMaintainer<S>),
    Threshold(ThresholdMaintainer<S>),
}

impl<S: Scalar> Engine<S> {
    fn as_dyn(&self) -> &dyn Maintainer<Scalar = S> {
        match self {
            Engine::Amortized(m) => m,
            Engine::WorstCase(m) => m,
            Engine::Threshold(m) => m,
        }
    }

    fn as_dyn_mut(&mut self) -> &mut dyn Maintainer<Scalar = S> {
        match self {
            Engine::Amortized(m) => m,
            Engine::WorstCase(m) => m,
            Engine::Threshold(m) => m,
        }
    }
}

fn absorb(total: &mut OpStats, op: OpStats) {
    total.iterations += op.iterations;
    total.flips += op.flips;
    total.depth = total.depth.max(op.depth);
}

/// Fully dynamic density estimator over a logical (unduplicated) multigraph.
#[derive(Clone, Debug)]
pub struct DensityEstimator<S: Scalar = Rational> {
    mode: Mode,
    config: Config,
    k: u64,
    primary: Engine<S>,
    fallback: Option<WorstCaseMaintainer<S>>,
    thresholds: Thresholds,
    edges: HashMap<(Vertex, Vertex), u64>,
    m: u64,
}

impl<S: Scalar> DensityEstimator<S> {
    pub fn new(mode: Mode, config: Config) -> Result<Self> {
        config.validate()?;
        let k = config.dup_k;
        let (primary, fallback) = match mode {
            Mode::Amortized => (Engine::Amortized(AmortizedMaintainer::new(config.clone())?), None),
            Mode::WorstCase => (Engine::WorstCase(WorstCaseMaintainer::new(config.clone())?), None),
            Mode::Combined => {
                let t = config
                    .threshold_t
                    .unwrap_or_else(|| bounds::default_threshold(config.n, &config.eps));
                let cap = combined_cap(&config.eps, k, t);
                (
                    Engine::Threshold(ThresholdMaintainer::with_threshold(config.clone(), cap)?),
                    Some(WorstCaseMaintainer::new(config.clone())?),
                )
            }
        };
        let power = if mode == Mode::Amortized { 2 } else { 3 };
        Ok(DensityEstimator {
            thresholds: Thresholds::new(&config.alpha, power),
            mode,
            config,
            k,
            primary,
            fallback,
            edges: HashMap::new(),
            m: 0,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.config.n
    }

    /// Logical edge count, parallel edges included.
    pub fn edge_count(&self) -> u64 {
        self.m
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> u64 {
        self.edges.get(&key(u, v)).copied().unwrap_or(0)
    }

    /// Logical edges with multiplicities, `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &c)| (u, v, c))
    }

    /// The duplicated structure.
    pub fn primary(&self) -> &Structure<S> {
        self.primary.as_dyn().structure()
    }

    /// The unduplicated structure of combined mode.
    pub fn fallback(&self) -> Option<&Structure<S>> {
        self.fallback.as_ref().map(|f| f.structure())
    }

    pub fn primary_rule(&self) -> Rule {
        self.primary.as_dyn().rule()
    }

    /// Level cap of the duplicated structure in combined mode.
    pub fn truncation_cap(&self) -> Option<u64> {
        self.primary().cap()
    }

    /// True when combined mode answers from the unduplicated structure.
    pub fn uses_fallback(&self) -> bool {
        match self.primary().cap() {
            Some(cap) if self.fallback.is_some() => self.primary().max_level() >= cap,
            _ => false,
        }
    }

    /// Counters of all inner structures, summed.
    pub fn counters(&self) -> Counters {
        let mut c = self.primary().counters().clone();
        if let Some(f) = self.fallback() {
            c.merge(f.counters());
        }
        c
    }

    pub fn insert_edge(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.primary().check_pair(u, v)?;
        let mut total = OpStats::default();
        for _ in 0..self.k {
            absorb(&mut total, self.primary.as_dyn_mut().insert(u, v)?);
        }
        if let Some(f) = self.fallback.as_mut() {
            absorb(&mut total, f.insert(u, v)?);
        }
        *self.edges.entry(key(u, v)).or_insert(0) += 1;
        self.m += 1;
        self.cover_levels();
        Ok(total)
    }

    pub fn delete_edge(&mut self, u: Vertex, v: Vertex) -> Result<OpStats> {
        self.primary().check_pair(u, v)?;
        let Some(c) = self.edges.get_mut(&key(u, v)) else {
            return Err(Error::MissingEdge(u, v));
        };
        *c -= 1;
        if *c == 0 {
            self.edges.remove(&key(u, v));
        }
        self.m -= 1;
        let mut total = OpStats::default();
        for _ in 0..self.k {
            absorb(&mut total, self.primary.as_dyn_mut().delete(u, v)?);
        }
        if let Some(f) = self.fallback.as_mut() {
            absorb(&mut total, f.delete(u, v)?);
        }
        Ok(total)
    }

    /// Upper estimate of the densest subgraph density, in O(1).
    pub fn density_value(&self) -> Rational {
        if self.uses_fallback() {
            let f = self.fallback().expect("combined mode");
            return Rational::from_integer(f.max_deg() as i64);
        }
        Rational::new(self.primary().max_level() as i64, self.k as i64)
    }

    /// An approximately densest vertex set, sorted ascending; empty when the
    /// graph has no edges.
    pub fn densest_subgraph(&self) -> Vec<Vertex> {
        let s = if self.uses_fallback() {
            self.fallback().expect("combined mode")
        } else {
            self.primary()
        };
        extract(s.degrees(), s.cap(), &self.thresholds, &self.config.eps)
    }

    /// Exact density `|E(S)| / |S|` of the logical graph.
    pub fn subgraph_density(&self, set: &[Vertex]) -> Result<Rational> {
        let members = vertex_set(set, self.config.n)?;
        let inside: u64 = if members.len() * members.len() < 2 * self.edges.len() {
            let mut sorted: Vec<Vertex> = members.iter().copied().collect();
            sorted.sort_unstable();
            let mut c = 0;
            for (i, &u) in sorted.iter().enumerate() {
                for &v in &sorted[i + 1..] {
                    c += self.multiplicity(u, v);
                }
            }
            c
        } else {
            self.edges
                .iter()
                .filter(|((u, v), _)| members.contains(u) && members.contains(v))
                .map(|(_, &c)| c)
                .sum()
        };
        Ok(Rational::new(inside as i64, members.len() as i64))
    }

    /// Invariant scans of every inner structure.
    pub fn check_invariants(&self) -> std::result::Result<(), Violation> {
        self.primary.as_dyn().check_invariants()?;
        if let Some(f) = &self.fallback {
            f.check_invariants()?;
        }
        Ok(())
    }

    fn cover_levels(&mut self) {
        let mut mu = self.primary().max_level();
        if let Some(f) = self.fallback() {
            mu = mu.max(f.max_deg());
        }
        self.thresholds.cover(mu);
    }
}

/// `⌈(1+ε)·k·T⌉`, the truncation cap of the duplicated structure.
pub fn combined_cap(eps: &Rational, k: u64, t: u64) -> u64 {
    let kt = k as i128 * t as i128;
    let (p, q) = (*eps.numer() as i128, *eps.denom() as i128);
    ((kt * (p + q) + q - 1) / q) as u64
}

pub(crate) fn vertex_set(set: &[Vertex], n: u32) -> Result<HashSet<Vertex>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut members = HashSet::with_capacity(set.len());
    for &v in set {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        members.insert(v);
    }
    Ok(members)
}

fn key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    (u.min(v), u.max(v))
}

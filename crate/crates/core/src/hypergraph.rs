//! Orientation maintenance for hypergraphs of bounded rank.
//!
//! Each hyperedge is oriented toward one endpoint, its head. A handle stores
//! all `k` duplicated copies as counters per head choice, and each head
//! choice keeps one label per endpoint. Repairs follow the budgeted rules
//! with "the other endpoint" replaced by the endpoint of minimum level.

use std::collections::HashMap;

use crate::config::Config;
use crate::degree::DegreeTable;
use crate::density::{self, Thresholds};
use crate::error::{Error, Result};
use crate::index::LabelIndex;
use crate::invariants::{InvariantKind, Rule, Violation};
use crate::orientation::{in_list, out_list, Counters, OpStats};
use crate::scalar::{Scalar, Slack};
use crate::{Rational, Vertex};

pub const MAX_RANK: usize = 64;

pub type HyperId = u64;

#[derive(Clone, Debug, Default)]
struct HeadChoice {
    count: u64,
    labels: Vec<u64>,
}

#[derive(Clone, Debug)]
struct HyperRecord {
    handle: HyperId,
    ends: Vec<Vertex>,
    heads: Vec<HeadChoice>,
}

/// Read-only snapshot of one head choice with positive count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperArcView {
    pub handle: HyperId,
    pub endpoints: Vec<Vertex>,
    pub head: Vertex,
    pub count: u64,
    /// Labels aligned with `endpoints`.
    pub labels: Vec<u64>,
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Inc(Vertex),
    Dec(Vertex),
}

#[derive(Clone, Debug)]
pub struct HypergraphMaintainer<S: Scalar = Rational> {
    config: Config,
    rank: usize,
    slack: Slack<S>,
    cap: Option<u64>,
    budget: u64,
    records: Vec<Option<HyperRecord>>,
    free: Vec<u32>,
    handles: HashMap<HyperId, u32>,
    next_handle: HyperId,
    size: u64,
    degrees: DegreeTable,
    index: LabelIndex,
    thresholds: Thresholds,
    counters: Counters,
    op: OpStats,
    tasks: Vec<Task>,
}

impl<S: Scalar> HypergraphMaintainer<S> {
    /// Each logical hyperedge becomes `config.dup_k` copies.
    pub fn new(config: Config, rank: u32) -> Result<Self> {
        Self::with_cap(config, rank, None)
    }

    /// Same rules on levels truncated at `t`.
    pub fn with_threshold(config: Config, rank: u32, t: u64) -> Result<Self> {
        Self::with_cap(config, rank, Some(t))
    }

    fn with_cap(config: Config, rank: u32, cap: Option<u64>) -> Result<Self> {
        config.validate()?;
        let rank = rank as usize;
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::Config(format!("rank must lie in 2..={MAX_RANK}, got {rank}")));
        }
        if cap == Some(0) {
            return Err(Error::Config("truncation cap must be at least 1".into()));
        }
        let n = config.n;
        Ok(HypergraphMaintainer {
            slack: Slack::new(&config.alpha),
            budget: config.arc_budget(),
            thresholds: Thresholds::new(&config.alpha, 3),
            rank,
            cap,
            records: Vec::new(),
            free: Vec::new(),
            handles: HashMap::new(),
            next_handle: 0,
            size: 0,
            degrees: DegreeTable::new(n),
            index: LabelIndex::new(2 * n as usize),
            counters: Counters::default(),
            op: OpStats::default(),
            tasks: Vec::new(),
            config,
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn k(&self) -> u64 {
        self.config.dup_k
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    pub fn n(&self) -> u32 {
        self.config.n
    }

    /// Live logical hyperedges.
    pub fn edge_count(&self) -> usize {
        self.handles.len()
    }

    /// Sum of endpoint counts over live logical hyperedges.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn indeg(&self, v: Vertex) -> u64 {
        self.degrees.get(v)
    }

    pub fn level(&self, v: Vertex) -> u64 {
        let d = self.degrees.get(v);
        self.cap.map_or(d, |t| d.min(t))
    }

    pub fn max_deg(&self) -> u64 {
        self.degrees.max()
    }

    pub fn max_level(&self) -> u64 {
        let d = self.degrees.max();
        self.cap.map_or(d, |t| d.min(t))
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Allocated records; one per live handle.
    pub fn record_count(&self) -> usize {
        self.handles.len()
    }

    /// Sorted endpoints of a live handle.
    pub fn endpoints(&self, id: HyperId) -> Option<&[Vertex]> {
        let &slot = self.handles.get(&id)?;
        self.records[slot as usize].as_ref().map(|r| r.ends.as_slice())
    }

    /// Live handles with their sorted endpoints.
    pub fn hyperedges(&self) -> impl Iterator<Item = (HyperId, &[Vertex])> + '_ {
        self.records.iter().flatten().map(|r| (r.handle, r.ends.as_slice()))
    }

    pub fn arcs(&self) -> impl Iterator<Item = HyperArcView> + '_ {
        self.records.iter().flatten().flat_map(|r| {
            r.heads
                .iter()
                .enumerate()
                .filter(|(_, h)| h.count > 0)
                .map(move |(d, h)| HyperArcView {
                    handle: r.handle,
                    endpoints: r.ends.clone(),
                    head: r.ends[d],
                    count: h.count,
                    labels: h.labels.clone(),
                })
        })
    }

    /// Inserts one logical hyperedge as `k` copies and returns its handle.
    pub fn insert_hyperedge(&mut self, endpoints: &[Vertex]) -> Result<(HyperId, OpStats)> {
        let ends = self.validate(endpoints)?;
        let slot = self.new_record(ends);
        let handle = self.records[slot as usize].as_ref().unwrap().handle;
        let mut total = OpStats::default();
        for _ in 0..self.config.dup_k {
            self.begin_op();
            let dir = self.insertion_head(slot);
            if self.put_copy(slot, dir) {
                let head = self.end(slot, dir);
                self.run(Task::Inc(head));
            }
            absorb(&mut total, self.end_op());
        }
        self.size += self.end_count(slot) as u64;
        self.cover_levels();
        Ok((handle, total))
    }

    /// Removes all copies of a live hyperedge.
    pub fn delete_hyperedge(&mut self, id: HyperId) -> Result<OpStats> {
        let &slot = self.handles.get(&id).ok_or(Error::DeadHyperedge(id))?;
        let mut total = OpStats::default();
        for _ in 0..self.config.dup_k {
            self.begin_op();
            let dir = self.deletion_head(slot);
            if self.take_copy(slot, dir) {
                let head = self.end(slot, dir);
                self.run(Task::Dec(head));
            }
            absorb(&mut total, self.end_op());
        }
        self.size -= self.end_count(slot) as u64;
        self.handles.remove(&id);
        self.records[slot as usize] = None;
        self.free.push(slot);
        Ok(total)
    }

    /// Upper estimate `max level / k` of the densest subhypergraph density.
    pub fn density_value(&self) -> Rational {
        Rational::new(self.max_level() as i64, self.config.dup_k as i64)
    }

    /// An approximately densest vertex set, sorted ascending.
    pub fn densest_subgraph(&self) -> Vec<Vertex> {
        density::extract(&self.degrees, self.cap, &self.thresholds, &self.config.eps)
    }

    /// Exact density: hyperedges with every endpoint in `set`, over `|set|`.
    pub fn subgraph_density(&self, set: &[Vertex]) -> Result<Rational> {
        let members = density::vertex_set(set, self.config.n)?;
        let inside = self
            .hyperedges()
            .filter(|(_, ends)| ends.iter().all(|v| members.contains(v)))
            .count();
        Ok(Rational::new(inside as i64, members.len() as i64))
    }

    /// Consistency audit plus the label and local optimality inequalities
    /// between each head and every other endpoint.
    pub fn check_invariants(&self) -> std::result::Result<(), Violation> {
        self.check_consistency().map_err(|detail| Violation {
            kind: InvariantKind::Consistency,
            tail: 0,
            head: 0,
            detail,
        })?;
        let s = &self.slack;
        let (base, coeff) = Rule::WorstCase.additive();
        let growth = s.growth(Rule::WorstCase.growth_power());
        for a in self.arcs() {
            let hi = a.endpoints.iter().position(|&v| v == a.head).unwrap();
            let lh = self.level(a.head);
            for (j, &u) in a.endpoints.iter().enumerate() {
                let fail = |kind, detail: String| {
                    Err(Violation {
                        kind,
                        tail: u,
                        head: a.head,
                        detail: format!("hyperedge {}: {detail}", a.handle),
                    })
                };
                if let Some(t) = self.cap {
                    if a.labels[j] > t {
                        return fail(InvariantKind::Cap, format!("label {} above T={t}", a.labels[j]));
                    }
                }
                if j == hi {
                    if !s.within_plus_one(lh, a.labels[hi]) {
                        return fail(InvariantKind::Head, format!("level_h={lh} lab_h={}", a.labels[hi]));
                    }
                    continue;
                }
                let lu = self.level(u);
                if !s.within_plus_one(a.labels[hi], a.labels[j]) {
                    return fail(
                        InvariantKind::Order,
                        format!("lab_t={} lab_h={}", a.labels[j], a.labels[hi]),
                    );
                }
                if !s.within_plus_one(a.labels[j], lu) {
                    return fail(InvariantKind::Tail, format!("lab_t={} level_t={lu}", a.labels[j]));
                }
                if S::from_count(lh) > growth.clone() * S::from_count(lu) + s.additive(base, coeff) {
                    return fail(InvariantKind::LocalOptimality, format!("level_h={lh} level_t={lu}"));
                }
            }
        }
        Ok(())
    }

    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let n = self.config.n as usize;
        let mut indeg = vec![0u64; n];
        let mut in_len = vec![0usize; n];
        let mut out_len = vec![0usize; n];
        let mut size = 0u64;
        for (slot, rec) in self.records.iter().enumerate() {
            let Some(rec) = rec else { continue };
            if self.handles.get(&rec.handle) != Some(&(slot as u32)) {
                return Err(format!("record {slot} is not reachable from its handle"));
            }
            size += rec.ends.len() as u64;
            let total: u64 = rec.heads.iter().map(|h| h.count).sum();
            if total != self.config.dup_k {
                return Err(format!("hyperedge {} holds {total} copies", rec.handle));
            }
            for (d, h) in rec.heads.iter().enumerate() {
                for j in 0..rec.ends.len() {
                    let node = self.node(slot as u32, d, j);
                    if h.count == 0 {
                        if self.index.contains(node) {
                            return Err(format!("empty head choice of {} still indexed", rec.handle));
                        }
                        continue;
                    }
                    if self.index.label_of(node) != Some(h.labels[j]) {
                        return Err(format!("index label of hyperedge {} disagrees", rec.handle));
                    }
                    if j == d {
                        in_len[rec.ends[j] as usize] += 1;
                    } else {
                        out_len[rec.ends[j] as usize] += 1;
                    }
                }
                indeg[rec.ends[d] as usize] += h.count;
            }
        }
        if size != self.size {
            return Err("hypergraph size disagrees".into());
        }
        for v in 0..n {
            let vx = v as Vertex;
            if indeg[v] != self.degrees.get(vx) {
                return Err(format!("indeg({v}) disagrees with head counts"));
            }
            for (list, want) in [(in_list(vx), in_len[v]), (out_list(vx), out_len[v])] {
                if self.index.len(list) != want || self.index.level(list) != self.level(vx) {
                    return Err(format!("index list {list} is stale"));
                }
                self.index.check(list)?;
            }
        }
        self.degrees.check()
    }

    fn validate(&self, endpoints: &[Vertex]) -> Result<Vec<Vertex>> {
        if endpoints.len() < 2 || endpoints.len() > self.rank {
            return Err(Error::InvalidHyperedge(format!(
                "{} endpoints, expected 2..={}",
                endpoints.len(),
                self.rank
            )));
        }
        let mut ends = endpoints.to_vec();
        ends.sort_unstable();
        for &v in &ends {
            if v >= self.config.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.config.n,
                });
            }
        }
        if let Some(w) = ends.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidHyperedge(format!("endpoint {} repeated", w[0])));
        }
        Ok(ends)
    }

    fn node(&self, slot: u32, dir: usize, j: usize) -> u32 {
        let r = self.rank as u64;
        let id = slot as u64 * r * r + dir as u64 * r + j as u64;
        u32::try_from(id).expect("hyperedge index overflow")
    }

    fn decode(&self, node: u32) -> (u32, usize, usize) {
        let r = self.rank as u32;
        (node / (r * r), (node / r % r) as usize, (node % r) as usize)
    }

    fn record(&self, slot: u32) -> &HyperRecord {
        self.records[slot as usize].as_ref().expect("live record")
    }

    fn end(&self, slot: u32, j: usize) -> Vertex {
        self.record(slot).ends[j]
    }

    fn end_count(&self, slot: u32) -> usize {
        self.record(slot).ends.len()
    }

    fn new_record(&mut self, ends: Vec<Vertex>) -> u32 {
        let handle = self.next_handle;
        self.next_handle += 1;
        let r = ends.len();
        let rec = HyperRecord {
            handle,
            heads: vec![
                HeadChoice {
                    count: 0,
                    labels: vec![0; r],
                };
                r
            ],
            ends,
        };
        let slot = match self.free.pop() {
            Some(s) => {
                self.records[s as usize] = Some(rec);
                s
            }
            None => {
                self.records.push(Some(rec));
                (self.records.len() - 1) as u32
            }
        };
        let nodes = (slot as usize + 1) * self.rank * self.rank;
        self.index.reserve_nodes(nodes);
        self.handles.insert(handle, slot);
        slot
    }

    /// Endpoint index of minimum level, ties to the smallest id.
    fn insertion_head(&self, slot: u32) -> usize {
        let ends = &self.record(slot).ends;
        (0..ends.len()).min_by_key(|&j| (self.level(ends[j]), ends[j])).unwrap()
    }

    /// Positive head choice with maximum head level, ties to the smallest id.
    fn deletion_head(&self, slot: u32) -> usize {
        let rec = self.record(slot);
        (0..rec.ends.len())
            .filter(|&d| rec.heads[d].count > 0)
            .min_by_key(|&d| (std::cmp::Reverse(self.level(rec.ends[d])), rec.ends[d]))
            .expect("live hyperedge has a copy")
    }

    /// Minimum-level endpoint other than the head; `prefer` wins ties.
    fn lightest_tail(&self, slot: u32, head: usize, prefer: Option<Vertex>) -> usize {
        let ends = &self.record(slot).ends;
        (0..ends.len())
            .filter(|&j| j != head)
            .min_by_key(|&j| (self.level(ends[j]), Some(ends[j]) != prefer, ends[j]))
            .unwrap()
    }

    fn take_copy(&mut self, slot: u32, dir: usize) -> bool {
        let r = self.end_count(slot);
        let h = &mut self.records[slot as usize].as_mut().unwrap().heads[dir];
        h.count -= 1;
        if h.count == 0 {
            self.index.remove(self.node(slot, dir, dir));
            for j in (0..r).filter(|&j| j != dir) {
                self.index.remove(self.node(slot, dir, j));
            }
        }
        self.shift(self.end(slot, dir), false)
    }

    fn put_copy(&mut self, slot: u32, dir: usize) -> bool {
        self.records[slot as usize].as_mut().unwrap().heads[dir].count += 1;
        let rose = self.shift(self.end(slot, dir), true);
        self.relabel(slot, dir);
        rose
    }

    fn relabel(&mut self, slot: u32, dir: usize) {
        let r = self.end_count(slot);
        self.index.remove(self.node(slot, dir, dir));
        for j in (0..r).filter(|&j| j != dir) {
            self.index.remove(self.node(slot, dir, j));
        }
        let levels: Vec<u64> = self.record(slot).ends.iter().map(|&v| self.level(v)).collect();
        self.records[slot as usize].as_mut().unwrap().heads[dir].labels = levels;
        let ends = self.record(slot).ends.clone();
        self.index.insert(in_list(ends[dir]), self.node(slot, dir, dir));
        for j in (0..r).filter(|&j| j != dir) {
            self.index.insert(out_list(ends[j]), self.node(slot, dir, j));
        }
    }

    fn flip(&mut self, slot: u32, from: usize, to: usize) {
        self.take_copy(slot, from);
        self.put_copy(slot, to);
        self.counters.flips += 1;
        self.op.flips += 1;
    }

    fn shift(&mut self, v: Vertex, up: bool) -> bool {
        let before = self.level(v);
        if up {
            self.degrees.increment(v);
        } else {
            self.degrees.decrement(v);
        }
        let after = self.level(v);
        if after != before {
            self.index.set_level(in_list(v), after);
            self.index.set_level(out_list(v), after);
        }
        after != before
    }

    fn run(&mut self, first: Task) {
        self.tasks.push(first);
        let mut started = false;
        while let Some(task) = self.tasks.pop() {
            if started {
                self.descend();
            }
            started = true;
            match task {
                Task::Inc(v) => self.check_inc(v),
                Task::Dec(u) => self.check_dec(u),
            }
        }
    }

    fn check_inc(&mut self, mut v: Vertex) {
        'call: loop {
            for _ in 0..self.budget {
                let Some((node, label)) = self.index.first(in_list(v)) else {
                    return;
                };
                let lv = self.level(v);
                if !self.slack.dangerous(lv, label) {
                    return;
                }
                self.tick();
                let (slot, dir, _) = self.decode(node);
                let m = self.lightest_tail(slot, dir, None);
                let mv = self.end(slot, m);
                let lm = self.level(mv);
                if self.slack.substantially_heavier(lv, lm) {
                    self.flip(slot, dir, m);
                    if self.level(mv) == lm {
                        return;
                    }
                    self.descend();
                    v = mv;
                    continue 'call;
                }
                self.relabel(slot, dir);
                self.counters.label_resets += 1;
            }
            return;
        }
    }

    fn check_dec(&mut self, mut u: Vertex) {
        'call: loop {
            for _ in 0..self.budget {
                let Some((node, label)) = self.index.last(out_list(u)) else {
                    return;
                };
                let lu = self.level(u);
                if !self.slack.dangerous(label, lu) {
                    return;
                }
                self.tick();
                let (slot, dir, _) = self.decode(node);
                let h = self.end(slot, dir);
                let lh = self.level(h);
                let m = self.lightest_tail(slot, dir, Some(u));
                let mv = self.end(slot, m);
                let lm = self.level(mv);
                if self.slack.substantially_heavier(lh, lm) {
                    self.flip(slot, dir, m);
                    let h_fell = self.level(h) != lh;
                    if mv == u {
                        if !h_fell {
                            return;
                        }
                        self.descend();
                        u = h;
                        continue 'call;
                    }
                    if h_fell {
                        self.tasks.push(Task::Dec(h));
                    }
                    if self.level(mv) != lm {
                        self.tasks.push(Task::Inc(mv));
                    }
                    continue;
                }
                self.relabel(slot, dir);
                self.counters.label_resets += 1;
            }
            return;
        }
    }

    fn begin_op(&mut self) {
        self.op = OpStats::default();
    }

    fn tick(&mut self) {
        self.op.iterations += 1;
        self.counters.arcs_processed += 1;
    }

    fn descend(&mut self) {
        self.op.depth += 1;
    }

    fn end_op(&mut self) -> OpStats {
        self.counters.operations += 1;
        self.counters.max_op_iterations = self.counters.max_op_iterations.max(self.op.iterations);
        self.counters.max_depth = self.counters.max_depth.max(self.op.depth);
        self.op
    }

    fn cover_levels(&mut self) {
        self.thresholds.cover(self.max_level());
    }
}

fn absorb(total: &mut OpStats, op: OpStats) {
    total.iterations += op.iterations;
    total.flips += op.flips;
    total.depth = total.depth.max(op.depth);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(n: u32, rank: u32) -> HypergraphMaintainer {
        HypergraphMaintainer::new(Config::new(n).dup_k(1), rank).unwrap()
    }

    #[test]
    fn first_hyperedge_heads_at_smallest_id() {
        let mut h = plain(4, 3);
        let (id, _) = h.insert_hyperedge(&[2, 0, 1]).unwrap();
        assert_eq!(h.indeg(0), 1);
        assert_eq!(h.endpoints(id), Some(&[0, 1, 2][..]));
        assert_eq!(h.size(), 3);
        h.check_invariants().unwrap();
    }

    #[test]
    fn insert_then_delete_empties() {
        let mut h = plain(4, 3);
        let (id, _) = h.insert_hyperedge(&[0, 1, 2]).unwrap();
        h.delete_hyperedge(id).unwrap();
        assert_eq!(h.max_deg(), 0);
        assert_eq!((h.edge_count(), h.size()), (0, 0));
        assert_eq!(h.delete_hyperedge(id), Err(Error::DeadHyperedge(id)));
        h.check_invariants().unwrap();
    }

    #[test]
    fn rejects_malformed_hyperedges() {
        let mut h = plain(5, 3);
        assert!(matches!(h.insert_hyperedge(&[1]), Err(Error::InvalidHyperedge(_))));
        assert!(matches!(
            h.insert_hyperedge(&[0, 1, 2, 3]),
            Err(Error::InvalidHyperedge(_))
        ));
        assert!(matches!(
            h.insert_hyperedge(&[1, 2, 1]),
            Err(Error::InvalidHyperedge(_))
        ));
        assert!(matches!(
            h.insert_hyperedge(&[1, 7]),
            Err(Error::VertexOutOfRange { vertex: 7, .. })
        ));
        assert!(HypergraphMaintainer::<Rational>::new(Config::new(5), 1).is_err());
    }

    #[test]
    fn duplicated_single_edge_value() {
        let mut h = HypergraphMaintainer::<Rational>::new(Config::new(3).dup_k(24), 3).unwrap();
        h.insert_hyperedge(&[0, 1, 2]).unwrap();
        assert_eq!(h.density_value(), Rational::new(1, 3));
        assert_eq!(h.record_count(), 1);
        assert_eq!(h.densest_subgraph(), vec![0, 1, 2]);
        h.check_invariants().unwrap();
    }

    #[test]
    fn complete_three_uniform_on_four() {
        let mut h = HypergraphMaintainer::<Rational>::new(Config::new(4).dup_k(24), 3).unwrap();
        for e in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            h.insert_hyperedge(&e).unwrap();
            h.check_invariants().unwrap();
        }
        assert_eq!(h.density_value(), Rational::from_integer(1));
        assert_eq!(h.subgraph_density(&[0, 1, 2, 3]).unwrap(), Rational::from_integer(1));
        assert_eq!(h.subgraph_density(&[0, 1, 2]).unwrap(), Rational::new(1, 3));
    }

    #[test]
    fn empty_value_is_zero() {
        let h = plain(3, 3);
        assert_eq!(h.density_value(), Rational::from_integer(0));
        assert!(h.densest_subgraph().is_empty());
    }
}

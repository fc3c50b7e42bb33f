//! Oriented multigraph state shared by all maintainer variants.
//!
//! Parallel copies of an edge are stored as per-direction counters on one
//! record per vertex pair, and all copies of a direction share one label
//! pair. Labels always record the endpoints' *levels*: the in-degree, or the
//! truncated in-degree `min(d, T)` when a cap is configured.

use std::collections::HashMap;

use crate::config::Config;
use crate::degree::DegreeTable;
use crate::error::{Error, Result};
use crate::index::LabelIndex;
use crate::scalar::{Scalar, Slack};
use crate::{Rational, Vertex};

/// One oriented direction of an edge, identifying its record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
    record: u32,
}

impl Arc {
    pub fn reversed(self) -> Arc {
        Arc {
            tail: self.head,
            head: self.tail,
            record: self.record,
        }
    }

    fn dir(self) -> usize {
        (self.tail > self.head) as usize
    }
}

/// Read-only snapshot of one positively counted direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcView {
    pub tail: Vertex,
    pub head: Vertex,
    pub count: u64,
    pub label_tail: u64,
    pub label_head: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Direction {
    count: u64,
    label_tail: u64,
    label_head: u64,
}

/// Edge record for the pair `ends[0] < ends[1]`. Direction 0 is headed at
/// `ends[1]`, direction 1 at `ends[0]`.
#[derive(Clone, Debug)]
struct ArcRecord {
    ends: [Vertex; 2],
    dirs: [Direction; 2],
}

impl ArcRecord {
    fn tail(&self, dir: usize) -> Vertex {
        self.ends[dir]
    }

    fn head(&self, dir: usize) -> Vertex {
        self.ends[1 - dir]
    }
}

/// Cumulative work counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub operations: u64,
    pub arcs_processed: u64,
    pub flips: u64,
    pub label_resets: u64,
    pub max_op_iterations: u64,
    pub max_depth: u64,
}

impl Counters {
    /// Sums work counters and keeps the larger maxima.
    pub fn merge(&mut self, other: &Counters) {
        self.operations += other.operations;
        self.arcs_processed += other.arcs_processed;
        self.flips += other.flips;
        self.label_resets += other.label_resets;
        self.max_op_iterations = self.max_op_iterations.max(other.max_op_iterations);
        self.max_depth = self.max_depth.max(other.max_depth);
    }
}

/// Work done by a single public update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpStats {
    pub iterations: u64,
    pub flips: u64,
    /// Number of recursive repair calls chained after the first one.
    pub depth: u64,
}

pub(crate) fn in_list(v: Vertex) -> usize {
    2 * v as usize
}

pub(crate) fn out_list(v: Vertex) -> usize {
    2 * v as usize + 1
}

/// The oriented multigraph with degrees, labels and label indices.
#[derive(Clone, Debug)]
pub struct Structure<S: Scalar = Rational> {
    config: Config,
    slack: Slack<S>,
    cap: Option<u64>,
    records: Vec<Option<ArcRecord>>,
    free_records: Vec<u32>,
    live_records: usize,
    by_pair: HashMap<(Vertex, Vertex), u32>,
    degrees: DegreeTable,
    index: LabelIndex,
    counters: Counters,
    op: OpStats,
}

impl<S: Scalar> Structure<S> {
    /// Empty orientation over `config.n` vertices, uncapped.
    pub fn new(config: Config) -> Result<Self> {
        Self::with_cap(config, None)
    }

    /// Empty orientation whose levels are truncated at `cap`.
    pub fn with_cap(config: Config, cap: Option<u64>) -> Result<Self> {
        config.validate()?;
        if cap == Some(0) {
            return Err(Error::Config("truncation cap must be at least 1".into()));
        }
        let n = config.n;
        Ok(Structure {
            slack: Slack::new(&config.alpha),
            cap,
            records: Vec::new(),
            free_records: Vec::new(),
            live_records: 0,
            by_pair: HashMap::new(),
            degrees: DegreeTable::new(n),
            index: LabelIndex::new(2 * n as usize),
            counters: Counters::default(),
            op: OpStats::default(),
            config,
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn slack(&self) -> &Slack<S> {
        &self.slack
    }

    pub fn n(&self) -> u32 {
        self.config.n
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    pub fn indeg(&self, v: Vertex) -> u64 {
        self.degrees.get(v)
    }

    /// The in-degree the repair rules see: `min(d(v), T)` under a cap.
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

    pub fn degrees(&self) -> &DegreeTable {
        &self.degrees
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Number of live edge records (one per adjacent vertex pair).
    pub fn record_count(&self) -> usize {
        self.live_records
    }

    /// Record slots ever allocated.
    pub fn record_slots(&self) -> usize {
        self.records.len()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v >= self.config.n {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.config.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn check_pair(&self, u: Vertex, v: Vertex) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    /// The direction `(tail, head)` when it has at least one copy.
    pub fn arc(&self, tail: Vertex, head: Vertex) -> Option<Arc> {
        let &record = self.by_pair.get(&pair(tail, head))?;
        let arc = Arc { tail, head, record };
        (self.dir_state(arc).count > 0).then_some(arc)
    }

    /// Copies currently oriented from `tail` to `head`.
    pub fn count(&self, tail: Vertex, head: Vertex) -> u64 {
        self.by_pair
            .get(&pair(tail, head))
            .map_or(0, |&record| self.dir_state(Arc { tail, head, record }).count)
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> u64 {
        self.count(u, v) + self.count(v, u)
    }

    /// `(label_at_tail, label_at_head)` of a positively counted direction.
    pub fn labels(&self, arc: Arc) -> Option<(u64, u64)> {
        let d = self.dir_state(arc);
        (d.count > 0).then_some((d.label_tail, d.label_head))
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcView> + '_ {
        self.records.iter().flatten().flat_map(|r| {
            (0..2).filter(|&d| r.dirs[d].count > 0).map(move |d| ArcView {
                tail: r.tail(d),
                head: r.head(d),
                count: r.dirs[d].count,
                label_tail: r.dirs[d].label_tail,
                label_head: r.dirs[d].label_head,
            })
        })
    }

    /// An in-cut arc of `v` with minimum label at `v`.
    pub fn min_in_label_arc(&self, v: Vertex) -> Option<(Arc, u64)> {
        self.index
            .first(in_list(v))
            .map(|(node, label)| (self.arc_of_node(node), label))
    }

    /// An out-cut arc of `u` with maximum label at `u`.
    pub fn max_out_label_arc(&self, u: Vertex) -> Option<(Arc, u64)> {
        self.index
            .last(out_list(u))
            .map(|(node, label)| (self.arc_of_node(node), label))
    }

    /// Moves one copy of `arc` to the reverse direction and labels the
    /// reverse direction with the post-flip levels.
    pub fn flip(&mut self, arc: Arc) -> Result<Arc> {
        self.live_direction(arc)?;
        self.take_copy(arc);
        let rev = arc.reversed();
        self.put_copy(rev);
        self.counters.flips += 1;
        self.op.flips += 1;
        Ok(rev)
    }

    /// Resets both labels of `arc` (all of its copies) to the current levels.
    pub fn set_arc_labels(&mut self, arc: Arc) -> Result<()> {
        self.live_direction(arc)?;
        self.relabel(arc);
        self.counters.label_resets += 1;
        Ok(())
    }

    /// Head choice for a new copy of `{u, v}`: the endpoint of smaller level,
    /// ties to the smaller id. Returns `(tail, head)`.
    pub(crate) fn insertion_orientation(&self, u: Vertex, v: Vertex) -> (Vertex, Vertex) {
        let (lu, lv) = (self.level(u), self.level(v));
        if lv < lu || (lv == lu && v < u) {
            (u, v)
        } else {
            (v, u)
        }
    }

    /// Direction to delete a copy of `{u, v}` from: a positive direction,
    /// preferring the head of larger level, ties to the smaller head id.
    pub(crate) fn deletion_arc(&self, u: Vertex, v: Vertex) -> Result<Arc> {
        match (self.arc(u, v), self.arc(v, u)) {
            (None, None) => Err(Error::MissingEdge(u, v)),
            (Some(a), None) | (None, Some(a)) => Ok(a),
            (Some(a), Some(b)) => {
                let (la, lb) = (self.level(a.head), self.level(b.head));
                Ok(if la > lb || (la == lb && a.head < b.head) { a } else { b })
            }
        }
    }

    /// Adds a copy `tail -> head`, labelling the direction with post-insert
    /// levels. Returns whether the head's level rose.
    pub(crate) fn add_copy(&mut self, tail: Vertex, head: Vertex) -> bool {
        let record = match self.by_pair.get(&pair(tail, head)) {
            Some(&r) => r,
            None => self.new_record(tail, head),
        };
        self.put_copy(Arc { tail, head, record })
    }

    /// Removes one copy of `arc`. Returns whether the head's level fell.
    pub(crate) fn remove_copy(&mut self, arc: Arc) -> Result<bool> {
        self.live_direction(arc)?;
        let fell = self.take_copy(arc);
        let rec = self.records[arc.record as usize].as_ref().expect("live record");
        if rec.dirs[0].count == 0 && rec.dirs[1].count == 0 {
            let ends = rec.ends;
            self.records[arc.record as usize] = None;
            self.by_pair.remove(&(ends[0], ends[1]));
            self.free_records.push(arc.record);
            self.live_records -= 1;
        }
        Ok(fell)
    }

    pub(crate) fn begin_op(&mut self) {
        self.op = OpStats::default();
    }

    pub(crate) fn tick(&mut self) {
        self.op.iterations += 1;
        self.counters.arcs_processed += 1;
    }

    pub(crate) fn descend(&mut self) {
        self.op.depth += 1;
    }

    pub(crate) fn end_op(&mut self) -> OpStats {
        self.counters.operations += 1;
        self.counters.max_op_iterations = self.counters.max_op_iterations.max(self.op.iterations);
        self.counters.max_depth = self.counters.max_depth.max(self.op.depth);
        self.op
    }

    /// Full audit: degrees, degree table, index membership, labels and cursors.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let n = self.config.n as usize;
        let mut indeg = vec![0u64; n];
        let mut in_len = vec![0usize; n];
        let mut out_len = vec![0usize; n];
        let mut live = 0;
        for (id, rec) in self.records.iter().enumerate() {
            let Some(rec) = rec else { continue };
            live += 1;
            if rec.ends[0] >= rec.ends[1] {
                return Err(format!("record {id} has unordered ends {:?}", rec.ends));
            }
            if self.by_pair.get(&(rec.ends[0], rec.ends[1])) != Some(&(id as u32)) {
                return Err(format!("record {id} missing from the pair map"));
            }
            if rec.dirs[0].count == 0 && rec.dirs[1].count == 0 {
                return Err(format!("record {id} has no copies but is live"));
            }
            for d in 0..2 {
                let st = rec.dirs[d];
                let in_node = node_id(id as u32, d, 0);
                let out_node = node_id(id as u32, d, 1);
                if st.count == 0 {
                    if self.index.contains(in_node) || self.index.contains(out_node) {
                        return Err(format!("empty direction of record {id} still indexed"));
                    }
                    continue;
                }
                let (tail, head) = (rec.tail(d), rec.head(d));
                indeg[head as usize] += st.count;
                in_len[head as usize] += 1;
                out_len[tail as usize] += 1;
                if self.index.label_of(in_node) != Some(st.label_head) {
                    return Err(format!("in-index label of ({tail},{head}) disagrees"));
                }
                if self.index.label_of(out_node) != Some(st.label_tail) {
                    return Err(format!("out-index label of ({tail},{head}) disagrees"));
                }
                if let Some(t) = self.cap {
                    if st.label_head > t || st.label_tail > t {
                        return Err(format!("label of ({tail},{head}) exceeds cap {t}"));
                    }
                }
            }
        }
        if live != self.live_records || self.by_pair.len() != live {
            return Err("live record count disagrees".into());
        }
        for v in 0..n {
            let vx = v as Vertex;
            if indeg[v] != self.degrees.get(vx) {
                return Err(format!(
                    "indeg({v}) = {} but arcs sum to {}",
                    self.degrees.get(vx),
                    indeg[v]
                ));
            }
            for (list, want) in [(in_list(vx), in_len[v]), (out_list(vx), out_len[v])] {
                if self.index.len(list) != want {
                    return Err(format!(
                        "index list {list} holds {} arcs, expected {want}",
                        self.index.len(list)
                    ));
                }
                if self.index.level(list) != self.level(vx) {
                    return Err(format!("index list {list} tracks a stale level"));
                }
                self.index.check(list)?;
            }
        }
        self.degrees.check()
    }

    fn live_direction(&self, arc: Arc) -> Result<()> {
        let ok = self
            .records
            .get(arc.record as usize)
            .and_then(|r| r.as_ref())
            .is_some_and(|r| r.ends == pair_arr(arc.tail, arc.head) && r.dirs[arc.dir()].count > 0);
        if ok {
            Ok(())
        } else {
            Err(Error::EmptyDirection(arc.tail, arc.head))
        }
    }

    fn dir_state(&self, arc: Arc) -> Direction {
        self.records[arc.record as usize]
            .as_ref()
            .map_or(Direction::default(), |r| r.dirs[arc.dir()])
    }

    fn dir_mut(&mut self, arc: Arc) -> &mut Direction {
        &mut self.records[arc.record as usize].as_mut().expect("live record").dirs[arc.dir()]
    }

    fn arc_of_node(&self, node: u32) -> Arc {
        let record = node >> 2;
        let dir = ((node >> 1) & 1) as usize;
        let rec = self.records[record as usize].as_ref().expect("indexed record is live");
        Arc {
            tail: rec.tail(dir),
            head: rec.head(dir),
            record,
        }
    }

    fn new_record(&mut self, u: Vertex, v: Vertex) -> u32 {
        let rec = ArcRecord {
            ends: pair_arr(u, v),
            dirs: [Direction::default(); 2],
        };
        let id = match self.free_records.pop() {
            Some(id) => {
                self.records[id as usize] = Some(rec);
                id
            }
            None => {
                self.records.push(Some(rec));
                (self.records.len() - 1) as u32
            }
        };
        self.index.reserve_nodes(4 * (id as usize + 1));
        self.by_pair.insert(pair(u, v), id);
        self.live_records += 1;
        id
    }

    fn take_copy(&mut self, arc: Arc) -> bool {
        let st = self.dir_mut(arc);
        st.count -= 1;
        if st.count == 0 {
            self.index.remove(node_id(arc.record, arc.dir(), 0));
            self.index.remove(node_id(arc.record, arc.dir(), 1));
        }
        self.shift(arc.head, false)
    }

    fn put_copy(&mut self, arc: Arc) -> bool {
        self.dir_mut(arc).count += 1;
        let rose = self.shift(arc.head, true);
        self.relabel(arc);
        rose
    }

    fn relabel(&mut self, arc: Arc) {
        let (in_node, out_node) = (node_id(arc.record, arc.dir(), 0), node_id(arc.record, arc.dir(), 1));
        self.index.remove(in_node);
        self.index.remove(out_node);
        let (lt, lh) = (self.level(arc.tail), self.level(arc.head));
        let st = self.dir_mut(arc);
        st.label_tail = lt;
        st.label_head = lh;
        self.index.insert(in_list(arc.head), in_node);
        self.index.insert(out_list(arc.tail), out_node);
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
}

fn node_id(record: u32, dir: usize, side: usize) -> u32 {
    record * 4 + (dir as u32) * 2 + side as u32
}

fn pair(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn pair_arr(u: Vertex, v: Vertex) -> [Vertex; 2] {
    let (a, b) = pair(u, v);
    [a, b]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(n: u32) -> Structure {
        Structure::new(Config::new(n)).unwrap()
    }

    #[test]
    fn new_structure_is_empty() {
        let s = structure(3);
        assert_eq!(s.max_deg(), 0);
        assert_eq!(s.record_count(), 0);
        assert_eq!(s.arcs().count(), 0);
        s.check_consistency().unwrap();
        let one = structure(1);
        assert_eq!(one.n(), 1);
        one.check_consistency().unwrap();
    }

    #[test]
    fn zero_alpha_is_a_configuration_error() {
        let cfg = Config::new(3).alpha(Rational::from_integer(0));
        assert!(matches!(Structure::<Rational>::new(cfg), Err(Error::Config(_))));
    }

    #[test]
    fn flip_single_arc() {
        let mut s = structure(3);
        s.add_copy(1, 2);
        let a = s.arc(1, 2).unwrap();
        let r = s.flip(a).unwrap();
        assert_eq!((r.tail, r.head), (2, 1));
        assert_eq!((s.indeg(1), s.indeg(2)), (1, 0));
        assert_eq!(s.labels(r), Some((0, 1)));
        assert!(s.arc(1, 2).is_none());
        s.check_consistency().unwrap();
    }

    #[test]
    fn flip_moves_one_copy_of_many() {
        let mut s = structure(2);
        for _ in 0..3 {
            s.add_copy(0, 1);
        }
        let a = s.arc(0, 1).unwrap();
        s.flip(a).unwrap();
        assert_eq!(s.count(0, 1), 2);
        assert_eq!(s.count(1, 0), 1);
        assert_eq!((s.indeg(0), s.indeg(1)), (1, 2));
        // reverse direction labelled with post-flip levels (tail 1, head 0)
        assert_eq!(s.labels(s.arc(1, 0).unwrap()), Some((2, 1)));
        assert_eq!(s.record_count(), 1);
        s.check_consistency().unwrap();
    }

    #[test]
    fn flip_on_empty_direction_fails() {
        let mut s = structure(2);
        s.add_copy(0, 1);
        let a = s.arc(0, 1).unwrap();
        s.flip(a).unwrap();
        assert_eq!(s.flip(a), Err(Error::EmptyDirection(0, 1)));
    }

    #[test]
    fn min_in_label_tracks_relabels() {
        let mut s = structure(6);
        // arcs into 0 with labels 2, 2, 5 at vertex 0: build degrees by hand
        s.add_copy(1, 0); // label 1
        s.add_copy(2, 0); // label 2
        s.add_copy(3, 0); // label 3
        let (a, l) = s.min_in_label_arc(0).unwrap();
        assert_eq!((a.tail, l), (1, 1));
        s.set_arc_labels(a).unwrap();
        let (b, l) = s.min_in_label_arc(0).unwrap();
        assert_eq!((b.tail, l), (2, 2));
        s.set_arc_labels(b).unwrap();
        let (c, l) = s.min_in_label_arc(0).unwrap();
        assert_eq!((c.tail, l), (3, 3));
        assert!(s.min_in_label_arc(4).is_none());
        s.check_consistency().unwrap();
    }

    #[test]
    fn max_out_label_after_flip() {
        let mut s = structure(6);
        // out-arcs of 0 with labels 1 and 4 at vertex 0
        s.add_copy(2, 0);
        s.add_copy(0, 1); // label_at_0 = 1
        for t in 3..6 {
            s.add_copy(t, 0);
        }
        s.add_copy(0, 2); // label_at_0 = 4
        let (a, l) = s.max_out_label_arc(0).unwrap();
        assert_eq!((a.head, l), (2, 4));
        s.flip(a).unwrap();
        let (b, l) = s.max_out_label_arc(0).unwrap();
        assert_eq!((b.head, l), (1, 1));
        assert!(s.max_out_label_arc(1).is_none());
        s.check_consistency().unwrap();
    }

    #[test]
    fn set_arc_labels_copies_degrees_and_is_shared() {
        let mut s = structure(4);
        for t in [2, 3, 1] {
            s.add_copy(t, 0);
        }
        s.add_copy(0, 1);
        s.add_copy(0, 1);
        // indeg(0)=3, indeg(1)=2 now; shared labels of the two copies
        let a = s.arc(0, 1).unwrap();
        assert_eq!(s.count(0, 1), 2);
        s.set_arc_labels(a).unwrap();
        assert_eq!(s.labels(a), Some((3, 2)));
        s.set_arc_labels(a).unwrap();
        assert_eq!(s.labels(a), Some((3, 2)));
        s.check_consistency().unwrap();
    }

    #[test]
    fn removing_last_copies_frees_the_record() {
        let mut s = structure(3);
        s.add_copy(0, 1);
        s.add_copy(1, 0);
        assert_eq!(s.record_count(), 1);
        s.remove_copy(s.arc(0, 1).unwrap()).unwrap();
        s.remove_copy(s.arc(1, 0).unwrap()).unwrap();
        assert_eq!(s.record_count(), 0);
        assert_eq!(s.max_deg(), 0);
        s.check_consistency().unwrap();
    }

    #[test]
    fn capped_levels_and_labels() {
        let mut s: Structure = Structure::with_cap(Config::new(6), Some(2)).unwrap();
        for t in 1..5 {
            s.add_copy(t, 0);
        }
        assert_eq!(s.indeg(0), 4);
        assert_eq!(s.level(0), 2);
        assert!(s.arcs().all(|a| a.label_head <= 2));
        s.check_consistency().unwrap();
    }
}

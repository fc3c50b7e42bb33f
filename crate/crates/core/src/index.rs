//! Label-ordered arc lists.
//!
//! Each list is two nested doubly linked lists living in one arena: an outer
//! list of buckets in strictly increasing label order, and per bucket an
//! inner list of the items carrying that label. A cursor tracks the first
//! bucket whose label is at least the owning vertex's current level, which
//! is exactly where a freshly labelled item belongs. Every operation the
//! maintainers need is O(1); [`LabelIndex::set_level`] is O(1) for the ±1
//! level moves that degree changes produce.

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    bucket: u32,
    prev: u32,
    next: u32,
}

impl Node {
    const DETACHED: Node = Node {
        bucket: NIL,
        prev: NIL,
        next: NIL,
    };
}

#[derive(Clone, Copy, Debug)]
struct Bucket {
    label: u64,
    list: u32,
    first: u32,
    last: u32,
    prev: u32,
    next: u32,
}

#[derive(Clone, Copy, Debug)]
struct List {
    first: u32,
    last: u32,
    cursor: u32,
    level: u64,
    len: usize,
}

impl List {
    const EMPTY: List = List {
        first: NIL,
        last: NIL,
        cursor: NIL,
        level: 0,
        len: 0,
    };
}

/// Arena of label-ordered lists; items are caller-chosen dense node ids.
#[derive(Clone, Debug, Default)]
pub struct LabelIndex {
    nodes: Vec<Node>,
    buckets: Vec<Bucket>,
    free_buckets: Vec<u32>,
    lists: Vec<List>,
}

impl LabelIndex {
    pub fn new(lists: usize) -> Self {
        LabelIndex {
            nodes: Vec::new(),
            buckets: Vec::new(),
            free_buckets: Vec::new(),
            lists: vec![List::EMPTY; lists],
        }
    }

    /// Makes node ids `0..count` addressable.
    pub fn reserve_nodes(&mut self, count: usize) {
        if self.nodes.len() < count {
            let target = count.max(self.nodes.len() * 2);
            self.nodes.resize(target, Node::DETACHED);
        }
    }

    pub fn level(&self, list: usize) -> u64 {
        self.lists[list].level
    }

    pub fn len(&self, list: usize) -> usize {
        self.lists[list].len
    }

    pub fn is_empty(&self, list: usize) -> bool {
        self.lists[list].len == 0
    }

    pub fn contains(&self, node: u32) -> bool {
        self.nodes.get(node as usize).is_some_and(|n| n.bucket != NIL)
    }

    pub fn label_of(&self, node: u32) -> Option<u64> {
        let n = self.nodes.get(node as usize)?;
        (n.bucket != NIL).then(|| self.buckets[n.bucket as usize].label)
    }

    /// Moves the list's level, repositioning the cursor.
    pub fn set_level(&mut self, list: usize, level: u64) {
        let old = self.lists[list].level;
        self.lists[list].level = level;
        if level > old {
            loop {
                let c = self.lists[list].cursor;
                if c == NIL || self.buckets[c as usize].label >= level {
                    break;
                }
                self.lists[list].cursor = self.buckets[c as usize].next;
            }
        } else if level < old {
            loop {
                let c = self.lists[list].cursor;
                let p = if c == NIL {
                    self.lists[list].last
                } else {
                    self.buckets[c as usize].prev
                };
                if p == NIL || self.buckets[p as usize].label < level {
                    break;
                }
                self.lists[list].cursor = p;
            }
        }
    }

    /// Inserts `node` with label equal to the list's current level.
    pub fn insert(&mut self, list: usize, node: u32) {
        debug_assert!(!self.contains(node), "node {node} already linked");
        let level = self.lists[list].level;
        let cursor = self.lists[list].cursor;
        let bucket = if cursor != NIL && self.buckets[cursor as usize].label == level {
            cursor
        } else {
            let b = self.new_bucket(list as u32, level);
            self.link_bucket_before(list, b, cursor);
            self.lists[list].cursor = b;
            b
        };
        let last = self.buckets[bucket as usize].last;
        self.nodes[node as usize] = Node {
            bucket,
            prev: last,
            next: NIL,
        };
        if last == NIL {
            self.buckets[bucket as usize].first = node;
        } else {
            self.nodes[last as usize].next = node;
        }
        self.buckets[bucket as usize].last = node;
        self.lists[list].len += 1;
    }

    /// Unlinks `node`; a no-op for detached nodes.
    pub fn remove(&mut self, node: u32) {
        let Node { bucket, prev, next } = match self.nodes.get(node as usize) {
            Some(n) if n.bucket != NIL => *n,
            _ => return,
        };
        if prev == NIL {
            self.buckets[bucket as usize].first = next;
        } else {
            self.nodes[prev as usize].next = next;
        }
        if next == NIL {
            self.buckets[bucket as usize].last = prev;
        } else {
            self.nodes[next as usize].prev = prev;
        }
        self.nodes[node as usize] = Node::DETACHED;
        let list = self.buckets[bucket as usize].list as usize;
        self.lists[list].len -= 1;
        if self.buckets[bucket as usize].first == NIL {
            self.unlink_bucket(list, bucket);
        }
    }

    /// Item with the minimum label (first inserted among ties).
    pub fn first(&self, list: usize) -> Option<(u32, u64)> {
        let b = self.lists[list].first;
        (b != NIL).then(|| {
            let b = &self.buckets[b as usize];
            (b.first, b.label)
        })
    }

    /// Item with the maximum label (first inserted among ties).
    pub fn last(&self, list: usize) -> Option<(u32, u64)> {
        let b = self.lists[list].last;
        (b != NIL).then(|| {
            let b = &self.buckets[b as usize];
            (b.first, b.label)
        })
    }

    /// All `(node, label)` pairs in label order.
    pub fn iter(&self, list: usize) -> impl Iterator<Item = (u32, u64)> + '_ {
        let mut bucket = self.lists[list].first;
        let mut node = if bucket == NIL {
            NIL
        } else {
            self.buckets[bucket as usize].first
        };
        std::iter::from_fn(move || {
            if node == NIL {
                return None;
            }
            let label = self.buckets[bucket as usize].label;
            let out = (node, label);
            node = self.nodes[node as usize].next;
            if node == NIL {
                bucket = self.buckets[bucket as usize].next;
                if bucket != NIL {
                    node = self.buckets[bucket as usize].first;
                }
            }
            Some(out)
        })
    }

    /// Label the cursor points at, if any.
    pub fn cursor_label(&self, list: usize) -> Option<u64> {
        let c = self.lists[list].cursor;
        (c != NIL).then(|| self.buckets[c as usize].label)
    }

    /// Full structural audit of one list.
    pub fn check(&self, list: usize) -> Result<(), String> {
        let l = &self.lists[list];
        let mut expected_cursor = NIL;
        let mut prev_bucket = NIL;
        let mut prev_label: Option<u64> = None;
        let mut b = l.first;
        let mut count = 0;
        while b != NIL {
            let bk = &self.buckets[b as usize];
            if bk.list as usize != list {
                return Err(format!("bucket {b} belongs to list {} not {list}", bk.list));
            }
            if bk.prev != prev_bucket {
                return Err(format!("bucket {b} has a broken back link"));
            }
            if let Some(p) = prev_label {
                if bk.label <= p {
                    return Err(format!("labels not strictly increasing: {p} then {}", bk.label));
                }
            }
            if bk.first == NIL {
                return Err(format!("empty bucket {b} left linked"));
            }
            if expected_cursor == NIL && bk.label >= l.level {
                expected_cursor = b;
            }
            let mut prev_node = NIL;
            let mut n = bk.first;
            while n != NIL {
                let nd = &self.nodes[n as usize];
                if nd.bucket != b || nd.prev != prev_node {
                    return Err(format!("node {n} has inconsistent links"));
                }
                count += 1;
                prev_node = n;
                n = nd.next;
            }
            if bk.last != prev_node {
                return Err(format!("bucket {b} has a stale tail pointer"));
            }
            prev_label = Some(bk.label);
            prev_bucket = b;
            b = bk.next;
        }
        if l.last != prev_bucket {
            return Err("list tail pointer is stale".into());
        }
        if count != l.len {
            return Err(format!("list length {} but {count} items linked", l.len));
        }
        if l.cursor != expected_cursor {
            return Err(format!(
                "cursor at label {:?}, expected first label >= {}",
                self.cursor_label(list),
                l.level
            ));
        }
        Ok(())
    }

    fn new_bucket(&mut self, list: u32, label: u64) -> u32 {
        let b = Bucket {
            label,
            list,
            first: NIL,
            last: NIL,
            prev: NIL,
            next: NIL,
        };
        match self.free_buckets.pop() {
            Some(id) => {
                self.buckets[id as usize] = b;
                id
            }
            None => {
                self.buckets.push(b);
                (self.buckets.len() - 1) as u32
            }
        }
    }

    fn link_bucket_before(&mut self, list: usize, b: u32, before: u32) {
        let prev = if before == NIL {
            self.lists[list].last
        } else {
            self.buckets[before as usize].prev
        };
        self.buckets[b as usize].prev = prev;
        self.buckets[b as usize].next = before;
        if prev == NIL {
            self.lists[list].first = b;
        } else {
            self.buckets[prev as usize].next = b;
        }
        if before == NIL {
            self.lists[list].last = b;
        } else {
            self.buckets[before as usize].prev = b;
        }
    }

    fn unlink_bucket(&mut self, list: usize, b: u32) {
        let Bucket { prev, next, .. } = self.buckets[b as usize];
        if prev == NIL {
            self.lists[list].first = next;
        } else {
            self.buckets[prev as usize].next = next;
        }
        if next == NIL {
            self.lists[list].last = prev;
        } else {
            self.buckets[next as usize].prev = prev;
        }
        if self.lists[list].cursor == b {
            self.lists[list].cursor = next;
        }
        self.free_buckets.push(b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn labels(ix: &LabelIndex, list: usize) -> Vec<u64> {
        ix.iter(list).map(|(_, l)| l).collect()
    }

    #[test]
    fn min_and_max_follow_levels() {
        let mut ix = LabelIndex::new(1);
        ix.reserve_nodes(8);
        ix.set_level(0, 2);
        ix.insert(0, 0);
        ix.insert(0, 1);
        ix.set_level(0, 5);
        ix.insert(0, 2);
        assert_eq!(labels(&ix, 0), vec![2, 2, 5]);
        assert_eq!(ix.first(0), Some((0, 2)));
        assert_eq!(ix.last(0), Some((2, 5)));
        // relabel the label-2 items to 5
        ix.remove(0);
        ix.insert(0, 0);
        ix.remove(1);
        ix.insert(0, 1);
        assert_eq!(ix.first(0).map(|(_, l)| l), Some(5));
        ix.check(0).unwrap();
    }

    #[test]
    fn empty_list_queries() {
        let ix = LabelIndex::new(2);
        assert_eq!(ix.first(1), None);
        assert_eq!(ix.last(1), None);
        assert!(ix.is_empty(1));
    }

    #[test]
    fn inserting_below_existing_labels() {
        let mut ix = LabelIndex::new(1);
        ix.reserve_nodes(4);
        ix.set_level(0, 7);
        ix.insert(0, 0);
        ix.set_level(0, 6);
        ix.set_level(0, 5);
        ix.insert(0, 1);
        ix.set_level(0, 6);
        ix.insert(0, 2);
        assert_eq!(labels(&ix, 0), vec![5, 6, 7]);
        ix.check(0).unwrap();
    }

    #[derive(Clone, Debug)]
    enum Op {
        Up,
        Down,
        Insert(u8),
        Remove(u8),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            Just(Op::Up),
            Just(Op::Down),
            (0u8..24).prop_map(Op::Insert),
            (0u8..24).prop_map(Op::Remove),
        ]
    }

    proptest! {
        #[test]
        fn matches_a_sorted_model(ops in proptest::collection::vec(op(), 0..200)) {
            let mut ix = LabelIndex::new(1);
            ix.reserve_nodes(24);
            let mut model: BTreeMap<u8, u64> = BTreeMap::new();
            let mut level = 0u64;
            for op in ops {
                match op {
                    Op::Up => { level += 1; ix.set_level(0, level); }
                    Op::Down => if level > 0 { level -= 1; ix.set_level(0, level); },
                    Op::Insert(n) => if let std::collections::btree_map::Entry::Vacant(e) = model.entry(n) {
                        ix.insert(0, n as u32);
                        e.insert(level);
                    },
                    Op::Remove(n) => if model.remove(&n).is_some() {
                        ix.remove(n as u32);
                    },
                }
                ix.check(0).map_err(TestCaseError::fail)?;
                let mut want: Vec<u64> = model.values().copied().collect();
                want.sort();
                prop_assert_eq!(labels(&ix, 0), want.clone());
                prop_assert_eq!(ix.first(0).map(|(_, l)| l), want.first().copied());
                prop_assert_eq!(ix.last(0).map(|(_, l)| l), want.last().copied());
                for (&n, &l) in &model {
                    prop_assert_eq!(ix.label_of(n as u32), Some(l));
                }
            }
        }
    }
}

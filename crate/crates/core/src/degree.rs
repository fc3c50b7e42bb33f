//! Bucketed in-degree table.

use crate::Vertex;

const NIL: u32 = u32::MAX;

/// In-degrees with per-degree vertex buckets. Increments and decrements are
/// O(1) worst case, as is reading the maximum.
#[derive(Clone, Debug)]
pub struct DegreeTable {
    indeg: Vec<u64>,
    // per-degree intrusive vertex lists
    head: Vec<u32>,
    count: Vec<usize>,
    next: Vec<u32>,
    prev: Vec<u32>,
    max_deg: u64,
}

impl DegreeTable {
    pub fn new(n: u32) -> Self {
        let n = n as usize;
        let mut t = DegreeTable {
            indeg: vec![0; n],
            head: vec![NIL; 4],
            count: vec![0; 4],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            max_deg: 0,
        };
        for v in (0..n as u32).rev() {
            t.push(v, 0);
        }
        t
    }

    pub fn n(&self) -> u32 {
        self.indeg.len() as u32
    }

    pub fn get(&self, v: Vertex) -> u64 {
        self.indeg[v as usize]
    }

    pub fn max(&self) -> u64 {
        self.max_deg
    }

    /// Number of vertices with in-degree exactly `d`.
    pub fn bucket_len(&self, d: u64) -> usize {
        self.count.get(d as usize).copied().unwrap_or(0)
    }

    /// Vertices with in-degree exactly `d`.
    pub fn bucket(&self, d: u64) -> impl Iterator<Item = Vertex> + '_ {
        let mut v = self.head.get(d as usize).copied().unwrap_or(NIL);
        std::iter::from_fn(move || {
            (v != NIL).then(|| {
                let out = v;
                v = self.next[v as usize];
                out
            })
        })
    }

    pub fn increment(&mut self, v: Vertex) -> u64 {
        let d = self.indeg[v as usize];
        self.unlink(v, d);
        self.push(v, d + 1);
        self.indeg[v as usize] = d + 1;
        if d + 1 > self.max_deg {
            self.max_deg = d + 1;
        }
        d + 1
    }

    pub fn decrement(&mut self, v: Vertex) -> u64 {
        let d = self.indeg[v as usize];
        assert!(d > 0, "decrementing zero in-degree of vertex {v}");
        self.unlink(v, d);
        self.push(v, d - 1);
        self.indeg[v as usize] = d - 1;
        if d == self.max_deg && self.count[d as usize] == 0 {
            self.max_deg = d - 1;
        }
        d - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, u64)> + '_ {
        self.indeg.iter().enumerate().map(|(v, &d)| (v as Vertex, d))
    }

    pub fn check(&self) -> Result<(), String> {
        let true_max = self.indeg.iter().copied().max().unwrap_or(0);
        if true_max != self.max_deg {
            return Err(format!("max_deg {} but true maximum {true_max}", self.max_deg));
        }
        let total: usize = self.count.iter().sum();
        if total != self.indeg.len() {
            return Err(format!("bucket counts sum to {total}, not n"));
        }
        for (d, &c) in self.count.iter().enumerate() {
            let members: Vec<Vertex> = self.bucket(d as u64).collect();
            if members.len() != c || members.iter().any(|&v| self.indeg[v as usize] != d as u64) {
                return Err(format!("bucket {d} is inconsistent"));
            }
        }
        Ok(())
    }

    fn push(&mut self, v: Vertex, d: u64) {
        let d = d as usize;
        if d >= self.head.len() {
            let len = (d + 1).max(self.head.len() * 2);
            self.head.resize(len, NIL);
            self.count.resize(len, 0);
        }
        let h = self.head[d];
        self.next[v as usize] = h;
        self.prev[v as usize] = NIL;
        if h != NIL {
            self.prev[h as usize] = v;
        }
        self.head[d] = v;
        self.count[d] += 1;
    }

    fn unlink(&mut self, v: Vertex, d: u64) {
        let (p, n) = (self.prev[v as usize], self.next[v as usize]);
        if p == NIL {
            self.head[d as usize] = n;
        } else {
            self.next[p as usize] = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        }
        self.count[d as usize] -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_maximum_through_updates() {
        let mut t = DegreeTable::new(3);
        assert_eq!(t.max(), 0);
        t.increment(1);
        t.increment(1);
        t.increment(2);
        assert_eq!(t.max(), 2);
        t.decrement(1);
        assert_eq!(t.max(), 1);
        t.decrement(1);
        t.decrement(2);
        assert_eq!(t.max(), 0);
        assert_eq!(t.bucket_len(0), 3);
        t.check().unwrap();
    }

    #[test]
    fn grows_past_initial_capacity() {
        let mut t = DegreeTable::new(2);
        for _ in 0..100 {
            t.increment(0);
        }
        assert_eq!(t.max(), 100);
        assert_eq!(t.bucket(100).collect::<Vec<_>>(), vec![0]);
        t.check().unwrap();
    }
}

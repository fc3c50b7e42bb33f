//! Exact ground truth for small instances: densest subgraph, min-max
//! orientation, fractional orientation and hypergraph density.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::flow::{Dinic, INF};
use crate::{Rational, Vertex};

pub const BRUTE_FORCE_MAX_N: usize = 24;
pub const ORIENTATION_ENUM_MAX_M: usize = 20;
pub const HYPER_BRUTE_FORCE_MAX_N: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Maximum of `|E(S)|/|S|` over non-empty `S`.
    pub opt_density: Rational,
    /// A set attaining the optimum, sorted; empty when there are no edges.
    pub witness: Vec<Vertex>,
}

/// Edge shares `y(e, v)` of an optimal fractional orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalOrientation {
    /// `(u, v, multiplicity, y_u, y_v)` with `y_u + y_v = multiplicity`.
    pub shares: Vec<(Vertex, Vertex, u64, Rational, Rational)>,
    /// `Σ_e y(e, v)` per vertex.
    pub loads: Vec<Rational>,
}

impl FractionalOrientation {
    pub fn max_load(&self) -> Rational {
        self.loads.iter().copied().max().unwrap_or_default()
    }
}

fn validate(n: u32, edges: &[(Vertex, Vertex)]) -> Result<()> {
    for &(u, v) in edges {
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
    }
    Ok(())
}

/// Distinct pairs `u < v` with multiplicities.
fn grouped(edges: &[(Vertex, Vertex)]) -> Vec<(Vertex, Vertex, u64)> {
    let mut map = BTreeMap::new();
    for &(u, v) in edges {
        *map.entry((u.min(v), u.max(v))).or_insert(0u64) += 1;
    }
    map.into_iter().map(|((u, v), c)| (u, v, c)).collect()
}

fn mask_to_vec(mask: u64) -> Vec<Vertex> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Whether the sorted list of `a` precedes that of `b` lexicographically.
fn lex_less(a: u64, b: u64) -> bool {
    if a == b {
        return false;
    }
    let x = (a ^ b).trailing_zeros();
    if a >> x & 1 == 1 {
        // b lacks x: b is smaller only if it ends before x
        b >> x != 0
    } else {
        a >> x == 0
    }
}

/// Enumerates all `2^n − 1` subsets in Gray-code order.
pub fn exact_density_bruteforce(n: u32, edges: &[(Vertex, Vertex)]) -> Result<OracleResult> {
    validate(n, edges)?;
    if n as usize > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "vertices for subset enumeration (use exact_density_flow)",
            got: n as usize,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n as usize];
    for (u, v, c) in grouped(edges) {
        adj[u as usize].push((v as usize, c));
        adj[v as usize].push((u as usize, c));
    }
    let mut mask = 0u64;
    let mut inside = 0u64;
    let mut best = (0u64, 1u64);
    let mut best_mask = 0u64;
    for g in 1u64..(1u64 << n) {
        let x = g.trailing_zeros() as usize;
        let links: u64 = adj[x]
            .iter()
            .filter(|&&(y, _)| mask >> y & 1 == 1)
            .map(|&(_, c)| c)
            .sum();
        mask ^= 1 << x;
        if mask >> x & 1 == 1 {
            inside += links;
        } else {
            inside -= links;
        }
        let size = mask.count_ones() as u64;
        let lhs = inside as u128 * best.1 as u128;
        let rhs = best.0 as u128 * size as u128;
        if inside > 0 && (lhs > rhs || (lhs == rhs && lex_less(mask, best_mask))) {
            best = (inside, size);
            best_mask = mask;
        }
    }
    Ok(OracleResult {
        opt_density: Rational::new(best.0 as i64, best.1 as i64),
        witness: mask_to_vec(best_mask),
    })
}

type Big = Ratio<i128>;

struct DensityNetwork {
    dinic: Dinic,
    source: usize,
    sink: usize,
    vertex_arcs: Vec<usize>,
    edge_arcs: Vec<(usize, usize)>,
}

/// `s -> e` capacity `q·mult`, `e -> endpoints` unbounded, `v -> t` capacity `p`.
fn density_network(n: usize, pairs: &[(Vertex, Vertex, u64)], p: i128, q: i128) -> DensityNetwork {
    let source = n + pairs.len();
    let sink = source + 1;
    let mut dinic = Dinic::new(sink + 1);
    let mut edge_arcs = Vec::with_capacity(pairs.len());
    for (i, &(u, v, c)) in pairs.iter().enumerate() {
        let e = n + i;
        dinic.add_edge(source, e, q * c as i128);
        edge_arcs.push((dinic.add_edge(e, u as usize, INF), dinic.add_edge(e, v as usize, INF)));
    }
    let vertex_arcs = (0..n).map(|v| dinic.add_edge(v, sink, p)).collect();
    DensityNetwork {
        dinic,
        source,
        sink,
        vertex_arcs,
        edge_arcs,
    }
}

/// Runs the decision "some S has density > p/q"; returns it when it exists.
fn denser_than(n: usize, pairs: &[(Vertex, Vertex, u64)], lambda: &Big) -> Option<Vec<Vertex>> {
    let (p, q) = (*lambda.numer(), *lambda.denom());
    let mut net = density_network(n, pairs, p, q);
    let total: i128 = pairs.iter().map(|&(_, _, c)| q * c as i128).sum();
    let flow = net.dinic.max_flow(net.source, net.sink);
    if total - flow <= 0 {
        return None;
    }
    let side = net.dinic.source_side(net.source);
    Some((0..n as Vertex).filter(|&v| side[v as usize]).collect())
}

/// Goldberg's reduction with bisection over rationals; exact for any size.
pub fn exact_density_flow(n: u32, edges: &[(Vertex, Vertex)]) -> Result<OracleResult> {
    validate(n, edges)?;
    let pairs = grouped(edges);
    if pairs.is_empty() {
        return Ok(OracleResult {
            opt_density: Rational::from_integer(0),
            witness: Vec::new(),
        });
    }
    let nn = n as usize;
    let m = edges.len() as i128;
    // invariant: some set is denser than lo, and none is denser than hi
    let mut lo = Big::from_integer(0);
    let mut hi = Big::from_integer(m);
    let mut witness = denser_than(nn, &pairs, &lo).expect("an edge has positive density");
    let gap = Big::new(1, (n as i128) * (n as i128));
    while hi - lo >= gap {
        let mid = (lo + hi) / Big::from_integer(2);
        match denser_than(nn, &pairs, &mid) {
            Some(set) => {
                lo = mid;
                witness = set;
            }
            None => hi = mid,
        }
    }
    // the only density i/j (j <= n) in (lo, hi]
    let opt = (1..=n as i128)
        .map(|j| Big::new((hi * Big::from_integer(j)).floor().to_integer(), j))
        .find(|c| *c > lo)
        .expect("optimum lies in the final bracket");
    Ok(OracleResult {
        opt_density: Rational::new(*opt.numer() as i64, *opt.denom() as i64),
        witness,
    })
}

/// Minimum over orientations of the maximum in-degree.
pub fn exact_minmax_orientation(n: u32, edges: &[(Vertex, Vertex)]) -> Result<u64> {
    validate(n, edges)?;
    if edges.len() <= ORIENTATION_ENUM_MAX_M {
        return Ok(enumerate_orientations(n as usize, edges));
    }
    Ok(minmax_by_flow(n as usize, edges))
}

fn enumerate_orientations(n: usize, edges: &[(Vertex, Vertex)]) -> u64 {
    let mut deg = vec![0u64; n];
    for &(u, _) in edges {
        deg[u as usize] += 1;
    }
    let mut best = deg.iter().copied().max().unwrap_or(0);
    let mut mask = 0u64;
    for g in 1u64..(1u64 << edges.len()) {
        let i = g.trailing_zeros() as usize;
        let (u, v) = edges[i];
        mask ^= 1 << i;
        // bit set: edge i headed at v instead of u
        if mask >> i & 1 == 1 {
            deg[u as usize] -= 1;
            deg[v as usize] += 1;
        } else {
            deg[v as usize] -= 1;
            deg[u as usize] += 1;
        }
        best = best.min(deg.iter().copied().max().unwrap_or(0));
    }
    best
}

/// Smallest `t` such that every edge can be headed with in-degrees at most `t`.
fn minmax_by_flow(n: usize, edges: &[(Vertex, Vertex)]) -> u64 {
    let pairs = grouped(edges);
    let m = edges.len() as i128;
    let feasible = |t: i128| {
        let mut net = density_network(n, &pairs, t, 1);
        net.dinic.max_flow(net.source, net.sink) == m
    };
    let (mut lo, mut hi) = (0i128, m);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo as u64
}

/// An optimal fractional orientation: its maximum load equals the optimum density.
pub fn fractional_orientation(n: u32, edges: &[(Vertex, Vertex)]) -> Result<FractionalOrientation> {
    let opt = exact_density_flow(n, edges)?.opt_density;
    let pairs = grouped(edges);
    let (p, q) = (*opt.numer() as i128, *opt.denom() as i128);
    let mut net = density_network(n as usize, &pairs, p, q);
    net.dinic.max_flow(net.source, net.sink);
    let scale = |f: i128| Rational::new(f as i64, q as i64);
    let shares = pairs
        .iter()
        .zip(&net.edge_arcs)
        .map(|(&(u, v, c), &(au, av))| (u, v, c, scale(net.dinic.flow(au)), scale(net.dinic.flow(av))))
        .collect();
    let loads = net.vertex_arcs.iter().map(|&a| scale(net.dinic.flow(a))).collect();
    Ok(FractionalOrientation { shares, loads })
}

fn validate_hyper(n: u32, hyperedges: &[Vec<Vertex>]) -> Result<Vec<u64>> {
    hyperedges
        .iter()
        .map(|e| {
            if e.len() < 2 {
                return Err(Error::InvalidHyperedge(format!("{e:?} has fewer than 2 endpoints")));
            }
            let mut mask = 0u64;
            for &v in e {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if v >= 64 || mask >> v & 1 == 1 {
                    return Err(Error::InvalidHyperedge(format!("{e:?} repeats endpoint {v}")));
                }
                mask |= 1 << v;
            }
            Ok(mask)
        })
        .collect()
}

/// Densest subhypergraph by subset enumeration; a hyperedge counts toward S
/// when all its endpoints lie in S.
pub fn exact_hyper_density(n: u32, hyperedges: &[Vec<Vertex>]) -> Result<OracleResult> {
    if n as usize > HYPER_BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "vertices for hypergraph subset enumeration",
            got: n as usize,
            limit: HYPER_BRUTE_FORCE_MAX_N,
        });
    }
    let masks = validate_hyper(n, hyperedges)?;
    let mut best = (0u64, 1u64);
    let mut best_mask = 0u64;
    for mask in 1u64..(1u64 << n) {
        let inside = masks.iter().filter(|&&e| e & !mask == 0).count() as u64;
        let size = mask.count_ones() as u64;
        let lhs = inside as u128 * best.1 as u128;
        let rhs = best.0 as u128 * size as u128;
        if inside > 0 && (lhs > rhs || (lhs == rhs && lex_less(mask, best_mask))) {
            best = (inside, size);
            best_mask = mask;
        }
    }
    Ok(OracleResult {
        opt_density: Rational::new(best.0 as i64, best.1 as i64),
        witness: mask_to_vec(best_mask),
    })
}

/// Minimum over head choices of the maximum in-degree, by branch and bound.
pub fn exact_hyper_minmax_orientation(n: u32, hyperedges: &[Vec<Vertex>]) -> Result<u64> {
    validate_hyper(n, hyperedges)?;
    let mut deg = vec![0u64; n as usize];
    let mut best = hyperedges.len() as u64;
    branch(hyperedges, 0, &mut deg, 0, &mut best);
    Ok(best)
}

fn branch(edges: &[Vec<Vertex>], i: usize, deg: &mut [u64], cur: u64, best: &mut u64) {
    if cur >= *best {
        return;
    }
    if i == edges.len() {
        *best = cur;
        return;
    }
    for &v in &edges[i] {
        deg[v as usize] += 1;
        branch(edges, i + 1, deg, cur.max(deg[v as usize]), best);
        deg[v as usize] -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const K3: [(Vertex, Vertex); 3] = [(0, 1), (1, 2), (0, 2)];
    const K4: [(Vertex, Vertex); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn lexicographic_order_of_masks() {
        assert!(lex_less(0b01, 0b11)); // [0] < [0,1]
        assert!(lex_less(0b100011, 0b101)); // [0,1,5] < [0,2]
        assert!(!lex_less(0b101, 0b100011));
        assert!(lex_less(0b1, 0b10)); // [0] < [1]
    }

    #[test]
    fn brute_force_small_graphs() {
        let k3 = exact_density_bruteforce(3, &K3).unwrap();
        assert_eq!(k3.opt_density, r(1, 1));
        assert_eq!(k3.witness, vec![0, 1, 2]);
        assert_eq!(exact_density_bruteforce(4, &K4).unwrap().opt_density, r(3, 2));
        let e = exact_density_bruteforce(2, &[(0, 1)]).unwrap();
        assert_eq!((e.opt_density, e.witness), (r(1, 2), vec![0, 1]));
        let empty = exact_density_bruteforce(3, &[]).unwrap();
        assert_eq!((empty.opt_density, empty.witness), (r(0, 1), vec![]));
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        // two disjoint triangles, both density 1, as is their union
        let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
        let res = exact_density_bruteforce(6, &edges).unwrap();
        assert_eq!(res.witness, vec![0, 1, 2]);
    }

    #[test]
    fn brute_force_size_guard() {
        assert!(matches!(
            exact_density_bruteforce(25, &[]),
            Err(Error::TooLarge { limit: 24, .. })
        ));
    }

    #[test]
    fn flow_small_graphs() {
        assert_eq!(exact_density_flow(3, &[(0, 1), (1, 2)]).unwrap().opt_density, r(2, 3));
        assert_eq!(exact_density_flow(4, &K4).unwrap().opt_density, r(3, 2));
        let empty = exact_density_flow(5, &[]).unwrap();
        assert_eq!((empty.opt_density, empty.witness), (r(0, 1), vec![]));
        let k4p = exact_density_flow(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        assert_eq!((k4p.opt_density, k4p.witness), (r(3, 2), vec![0, 1, 2, 3]));
        // parallel edges count with multiplicity
        assert_eq!(
            exact_density_flow(3, &[(0, 1), (0, 1), (0, 1), (1, 2)])
                .unwrap()
                .opt_density,
            r(3, 2)
        );
    }

    #[test]
    fn flow_handles_larger_graphs() {
        // K_30: density 29/2
        let mut edges = Vec::new();
        for u in 0..30 {
            for v in (u + 1)..30 {
                edges.push((u, v));
            }
        }
        assert_eq!(exact_density_flow(40, &edges).unwrap().opt_density, r(29, 2));
        assert_eq!(exact_minmax_orientation(40, &edges).unwrap(), 15);
    }

    #[test]
    fn minmax_orientation_examples() {
        assert_eq!(exact_minmax_orientation(3, &K3).unwrap(), 1);
        assert_eq!(exact_minmax_orientation(4, &K4).unwrap(), 2);
        assert_eq!(exact_minmax_orientation(4, &[(0, 1), (0, 2), (0, 3)]).unwrap(), 1);
        assert_eq!(exact_minmax_orientation(4, &[]).unwrap(), 0);
        assert_eq!(minmax_by_flow(4, &K4), 2);
        assert_eq!(minmax_by_flow(3, &K3), 1);
    }

    #[test]
    fn fractional_orientation_is_balanced() {
        let f = fractional_orientation(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        assert_eq!(f.max_load(), r(3, 2));
        for &(_, _, c, yu, yv) in &f.shares {
            assert_eq!(yu + yv, Rational::from_integer(c as i64));
        }
        let total: Rational = f.loads.iter().copied().sum();
        assert_eq!(total, Rational::from_integer(7));
    }

    #[test]
    fn hypergraph_examples() {
        let one = exact_hyper_density(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!((one.opt_density, one.witness), (r(1, 3), vec![0, 1, 2]));
        let k43 = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        assert_eq!(exact_hyper_density(4, &k43).unwrap().opt_density, r(1, 1));
        assert_eq!(exact_hyper_density(4, &[]).unwrap().opt_density, r(0, 1));
        assert!(exact_hyper_density(3, &[vec![0, 0]]).is_err());
        assert!(exact_hyper_density(21, &[]).is_err());
        assert_eq!(exact_hyper_minmax_orientation(4, &k43).unwrap(), 1);
    }

    #[test]
    fn fano_plane_orientation() {
        let fano: Vec<Vec<Vertex>> = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ]
        .iter()
        .map(|e| e.to_vec())
        .collect();
        assert_eq!(exact_hyper_density(7, &fano).unwrap().opt_density, r(1, 1));
        assert_eq!(exact_hyper_minmax_orientation(7, &fano).unwrap(), 1);
    }
}

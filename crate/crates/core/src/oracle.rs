//! Brute-force reference solvers: subset dynamic programming over
//! (vertex set, endpoint) for k-paths, recursive enumeration at tiny
//! sizes, and backtracking for tree embeddings. These are the independent
//! ground truth the randomized solvers are tested against; they are also
//! exposed on the CLI for debugging.

use crate::graph::WeightedGraph;
use crate::ktree::TreePattern;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_n: u32,
    pub max_tree_k: u32,
    pub max_visited: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_n: 16, max_tree_k: 8, max_visited: 200_000_000 }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance too large for the oracle: {0}")]
    LimitExceeded(String),
    #[error("oracle requires integer weights")]
    RealWeights,
}

const INF: i64 = i64::MAX / 4;

struct IntAdjacency {
    n: usize,
    out: Vec<Vec<(usize, i64)>>,
}

fn int_adjacency(g: &WeightedGraph) -> Result<IntAdjacency, OracleError> {
    let arcs = g.arcs().map_err(|_| OracleError::RealWeights)?;
    let n = g.n() as usize;
    let mut out = vec![Vec::new(); n + 1];
    for a in arcs {
        if a.from != a.to {
            out[a.from as usize].push((a.to as usize, a.weight));
        }
    }
    Ok(IntAdjacency { n, out })
}

fn check_limits(g: &WeightedGraph, limits: &OracleLimits) -> Result<(), OracleError> {
    if g.n() > limits.max_n {
        return Err(OracleError::LimitExceeded(format!(
            "n={} exceeds max_n={}",
            g.n(),
            limits.max_n
        )));
    }
    Ok(())
}

/// Exact minimum-weight simple path on k vertices via DP over
/// (vertex subset, first vertex). Returns the weight and the
/// lexicographically smallest optimal vertex sequence.
pub fn oracle_min_kpath(
    g: &WeightedGraph,
    k: u32,
) -> Result<Option<(i64, Vec<u32>)>, OracleError> {
    oracle_min_kpath_with(g, k, &OracleLimits::default())
}

pub fn oracle_min_kpath_with(
    g: &WeightedGraph,
    k: u32,
    limits: &OracleLimits,
) -> Result<Option<(i64, Vec<u32>)>, OracleError> {
    check_limits(g, limits)?;
    let n = g.n() as usize;
    if k == 0 || k as usize > n {
        return Ok(None);
    }
    if k == 1 {
        return Ok(Some((0, vec![1])));
    }
    let adj = int_adjacency(g)?;
    let k = k as usize;

    // h[mask * n + (first-1)] = min weight of a simple path on exactly the
    // vertices of `mask`, starting at `first`.
    let mut h = vec![INF; (1usize << n) * n];
    for v in 0..n {
        h[(1 << v) * n + v] = 0;
    }
    for mask in 1usize..1 << n {
        let pc = mask.count_ones() as usize;
        if pc < 2 || pc > k {
            continue;
        }
        for first in 0..n {
            if mask & (1 << first) == 0 {
                continue;
            }
            let rest = mask ^ (1 << first);
            let mut best = INF;
            for &(next, w) in &adj.out[first + 1] {
                let nbit = 1 << (next - 1);
                if rest & nbit != 0 {
                    let sub = h[rest * n + (next - 1)];
                    if sub < INF && w + sub < best {
                        best = w + sub;
                    }
                }
            }
            h[mask * n + first] = best;
        }
    }

    let mut best = INF;
    for mask in 1usize..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        for first in 0..n {
            if mask & (1 << first) != 0 {
                best = best.min(h[mask * n + first]);
            }
        }
    }
    if best >= INF {
        return Ok(None);
    }

    // Greedy front-to-back reconstruction: at each step pick the smallest
    // vertex that still extends to an optimal completion, which yields the
    // lexicographically smallest optimal sequence.
    let mut seq: Vec<u32> = Vec::with_capacity(k);
    let mut used: usize = 0;
    let mut target = best;
    for step in 0..k {
        let remaining = k - step;
        let mut chosen = None;
        'cand: for v in 0..n {
            if used & (1 << v) != 0 {
                continue;
            }
            if let Some(&prev) = seq.last() {
                let w = match adj.out[prev as usize].iter().find(|&&(t, _)| t == v + 1) {
                    Some(&(_, w)) => w,
                    None => continue,
                };
                for mask in 0usize..1 << n {
                    if mask.count_ones() as usize == remaining
                        && mask & used == 0
                        && mask & (1 << v) != 0
                        && h[mask * n + v] == target - w
                    {
                        target -= w;
                        chosen = Some(v);
                        break 'cand;
                    }
                }
            } else {
                for mask in 0usize..1 << n {
                    if mask.count_ones() as usize == remaining
                        && mask & (1 << v) != 0
                        && h[mask * n + v] == target
                    {
                        chosen = Some(v);
                        break 'cand;
                    }
                }
            }
        }
        let v = chosen.expect("optimal path must reconstruct");
        used |= 1 << v;
        seq.push(v as u32 + 1);
    }
    Ok(Some((best, seq)))
}

/// Every achievable simple-k-path weight, by the same subset DP keeping
/// weight sets per state.
pub fn oracle_kpath_weights(g: &WeightedGraph, k: u32) -> Result<BTreeSet<i64>, OracleError> {
    oracle_kpath_weights_with(g, k, &OracleLimits::default())
}

pub fn oracle_kpath_weights_with(
    g: &WeightedGraph,
    k: u32,
    limits: &OracleLimits,
) -> Result<BTreeSet<i64>, OracleError> {
    check_limits(g, limits)?;
    let n = g.n() as usize;
    if k == 0 || k as usize > n {
        return Ok(BTreeSet::new());
    }
    if k == 1 {
        return Ok(BTreeSet::from([0]));
    }
    if n > 14 {
        return Err(OracleError::LimitExceeded(format!(
            "weight-set DP limited to n <= 14, got {n}"
        )));
    }
    let adj = int_adjacency(g)?;
    let k = k as usize;
    let mut sets: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); (1usize << n) * n];
    for v in 0..n {
        sets[(1 << v) * n + v].insert(0);
    }
    for mask in 1usize..1 << n {
        let pc = mask.count_ones() as usize;
        if pc < 2 || pc > k {
            continue;
        }
        for first in 0..n {
            if mask & (1 << first) == 0 {
                continue;
            }
            let rest = mask ^ (1 << first);
            let mut acc = BTreeSet::new();
            for &(next, w) in &adj.out[first + 1] {
                let nbit = 1 << (next - 1);
                if rest & nbit != 0 {
                    for &s in &sets[rest * n + (next - 1)] {
                        acc.insert(w + s);
                    }
                }
            }
            sets[mask * n + first] = acc;
        }
    }
    let mut all = BTreeSet::new();
    for mask in 1usize..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        for first in 0..n {
            if mask & (1 << first) != 0 {
                all.extend(sets[mask * n + first].iter().copied());
            }
        }
    }
    Ok(all)
}

/// Recursive enumeration of every simple k-vertex sequence along arcs,
/// visiting each with its weight. Independent of the DP; used as the
/// oracle-of-the-oracle and for real weights.
fn enumerate_paths(
    out: &[Vec<(usize, f64)>],
    n: usize,
    k: usize,
    mut visit: impl FnMut(&[u32], f64),
) {
    fn rec(
        out: &[Vec<(usize, f64)>],
        k: usize,
        seq: &mut Vec<u32>,
        used: &mut Vec<bool>,
        weight: f64,
        visit: &mut impl FnMut(&[u32], f64),
    ) {
        if seq.len() == k {
            visit(seq, weight);
            return;
        }
        let last = *seq.last().unwrap() as usize;
        for &(next, w) in &out[last] {
            if !used[next] {
                used[next] = true;
                seq.push(next as u32);
                rec(out, k, seq, used, weight + w, visit);
                seq.pop();
                used[next] = false;
            }
        }
    }
    for start in 1..=n {
        let mut used = vec![false; n + 1];
        used[start] = true;
        let mut seq = vec![start as u32];
        rec(out, k, &mut seq, &mut used, 0.0, &mut visit);
    }
}

fn real_adjacency(g: &WeightedGraph) -> Vec<Vec<(usize, f64)>> {
    let n = g.n() as usize;
    let mut out = vec![Vec::new(); n + 1];
    for e in g.edges() {
        if e.from != e.to {
            out[e.from as usize].push((e.to as usize, e.weight));
            if !g.directed() {
                out[e.to as usize].push((e.from as usize, e.weight));
            }
        }
    }
    for row in &mut out {
        row.sort_by(|a, b| a.0.cmp(&b.0));
    }
    out
}

/// Minimum-weight k-path for real weights by exhaustive enumeration.
pub fn oracle_min_kpath_real(
    g: &WeightedGraph,
    k: u32,
) -> Result<Option<(f64, Vec<u32>)>, OracleError> {
    let n = g.n() as usize;
    if n > 12 {
        return Err(OracleError::LimitExceeded(format!(
            "real-weight enumeration limited to n <= 12, got {n}"
        )));
    }
    if k == 0 || k as usize > n {
        return Ok(None);
    }
    if k == 1 {
        return Ok(Some((0.0, vec![1])));
    }
    let out = real_adjacency(g);
    let mut best: Option<(f64, Vec<u32>)> = None;
    enumerate_paths(&out, n, k as usize, |seq, w| {
        let better = match &best {
            None => true,
            Some((bw, bseq)) => w < *bw || (w == *bw && seq < bseq.as_slice()),
        };
        if better {
            best = Some((w, seq.to_vec()));
        }
    });
    Ok(best)
}

/// Enumeration twin of `oracle_min_kpath`, for cross-checking the DP.
pub fn oracle_min_kpath_enumerated(
    g: &WeightedGraph,
    k: u32,
) -> Result<Option<(i64, Vec<u32>)>, OracleError> {
    g.require_integer_weights().map_err(|_| OracleError::RealWeights)?;
    if k == 1 && g.n() >= 1 {
        return Ok(Some((0, vec![1])));
    }
    Ok(oracle_min_kpath_real(g, k)?.map(|(w, seq)| (w as i64, seq)))
}

/// Enumeration twin of `oracle_kpath_weights`.
pub fn oracle_kpath_weights_enumerated(
    g: &WeightedGraph,
    k: u32,
) -> Result<BTreeSet<i64>, OracleError> {
    g.require_integer_weights().map_err(|_| OracleError::RealWeights)?;
    let n = g.n() as usize;
    if n > 12 {
        return Err(OracleError::LimitExceeded(format!("n={n} too large")));
    }
    if k == 0 || k as usize > n {
        return Ok(BTreeSet::new());
    }
    if k == 1 {
        return Ok(BTreeSet::from([0]));
    }
    let out = real_adjacency(g);
    let mut all = BTreeSet::new();
    enumerate_paths(&out, n, k as usize, |_, w| {
        all.insert(w as i64);
    });
    Ok(all)
}

/// Every achievable weight of an injective embedding of the tree, by
/// exhaustive backtracking without pruning.
pub fn oracle_ktree_weights(
    g: &WeightedGraph,
    t: &TreePattern,
) -> Result<BTreeSet<i64>, OracleError> {
    let limits = OracleLimits::default();
    check_limits(g, &limits)?;
    if t.k() > limits.max_tree_k {
        return Err(OracleError::LimitExceeded(format!(
            "k={} exceeds max_tree_k={}",
            t.k(),
            limits.max_tree_k
        )));
    }
    g.require_integer_weights().map_err(|_| OracleError::RealWeights)?;
    let n = g.n() as usize;
    let k = t.k() as usize;
    let mut all = BTreeSet::new();
    if k > n {
        return Ok(all);
    }
    let adj = int_adjacency(g)?;
    let order = t.root_first_order();
    let parent_pos: Vec<Option<usize>> = order
        .iter()
        .map(|&node| t.parent_of(node).map(|p| order.iter().position(|&x| x == p).unwrap()))
        .collect();
    fn rec(
        adj: &IntAdjacency,
        parent_pos: &[Option<usize>],
        assigned: &mut Vec<u32>,
        used: &mut Vec<bool>,
        weight: i64,
        all: &mut BTreeSet<i64>,
    ) {
        let pos = assigned.len();
        if pos == parent_pos.len() {
            all.insert(weight);
            return;
        }
        let candidates: Vec<(u32, i64)> = match parent_pos[pos] {
            None => (1..=adj.n as u32).map(|v| (v, 0)).collect(),
            Some(ppos) => adj.out[assigned[ppos] as usize]
                .iter()
                .map(|&(v, w)| (v as u32, w))
                .collect(),
        };
        for (v, w) in candidates {
            if !used[v as usize] {
                used[v as usize] = true;
                assigned.push(v);
                rec(adj, parent_pos, assigned, used, weight + w, all);
                assigned.pop();
                used[v as usize] = false;
            }
        }
    }
    rec(&adj, &parent_pos, &mut Vec::new(), &mut vec![false; n + 1], 0, &mut all);
    Ok(all)
}

/// Exact minimum-weight injective tree embedding by backtracking with
/// partial-weight pruning. Tree edges map to arcs oriented from the
/// parent-side image to the child-side image (both orientations exist in
/// undirected graphs). Returns the weight and the lexicographically
/// smallest optimal node->vertex assignment.
pub fn oracle_min_ktree(
    g: &WeightedGraph,
    t: &TreePattern,
) -> Result<Option<(i64, Vec<u32>)>, OracleError> {
    oracle_min_ktree_with(g, t, &OracleLimits::default())
}

pub fn oracle_min_ktree_with(
    g: &WeightedGraph,
    t: &TreePattern,
    limits: &OracleLimits,
) -> Result<Option<(i64, Vec<u32>)>, OracleError> {
    check_limits(g, limits)?;
    if t.k() > limits.max_tree_k {
        return Err(OracleError::LimitExceeded(format!(
            "k={} exceeds max_tree_k={}",
            t.k(),
            limits.max_tree_k
        )));
    }
    g.require_integer_weights().map_err(|_| OracleError::RealWeights)?;
    let n = g.n() as usize;
    let k = t.k() as usize;
    if k > n {
        return Ok(None);
    }
    let adj = int_adjacency(g)?;
    // Parent-first order: node order[i]'s parent appears earlier.
    let order = t.root_first_order();
    let parent_pos: Vec<Option<(usize, u32)>> = order
        .iter()
        .enumerate()
        .map(|(i, &node)| {
            t.parent_of(node).map(|p| {
                let pos = order.iter().position(|&x| x == p).unwrap();
                debug_assert!(pos < i);
                (pos, p)
            })
        })
        .collect();
    let min_edge = adj
        .out
        .iter()
        .flat_map(|row| row.iter().map(|&(_, w)| w))
        .min()
        .unwrap_or(0)
        .min(0);

    struct Search<'a> {
        adj: &'a IntAdjacency,
        order: &'a [u32],
        parent_pos: &'a [Option<(usize, u32)>],
        k: usize,
        min_edge: i64,
        assigned: Vec<u32>, // position in `order` -> graph vertex
        used: Vec<bool>,
        best: Option<(i64, Vec<u32>)>,
        visited: u64,
        budget: u64,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize, weight: i64) -> Result<(), OracleError> {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(OracleError::LimitExceeded(
                    "backtracking budget exhausted".into(),
                ));
            }
            if pos == self.k {
                let better = match &self.best {
                    None => true,
                    Some((bw, _)) => weight < *bw,
                };
                if better {
                    // map position assignment back to node-index order
                    let mut mapping = vec![0u32; self.k];
                    for (i, &node) in self.order.iter().enumerate() {
                        mapping[(node - 1) as usize] = self.assigned[i];
                    }
                    self.best = Some((weight, mapping));
                }
                return Ok(());
            }
            // prune: even all-minimal remaining edges cannot beat the best
            if let Some((bw, _)) = &self.best {
                let remaining = (self.k - pos) as i64;
                if weight + remaining * self.min_edge >= *bw {
                    return Ok(());
                }
            }
            let candidates: Vec<(u32, i64)> = match self.parent_pos[pos] {
                None => (1..=self.adj.n as u32).map(|v| (v, 0)).collect(),
                Some((ppos, _)) => {
                    let pv = self.assigned[ppos] as usize;
                    self.adj.out[pv].iter().map(|&(v, w)| (v as u32, w)).collect()
                }
            };
            for (v, w) in candidates {
                if self.used[v as usize] {
                    continue;
                }
                self.used[v as usize] = true;
                self.assigned[pos] = v;
                self.run(pos + 1, weight + w)?;
                self.used[v as usize] = false;
            }
            Ok(())
        }
    }

    let mut search = Search {
        adj: &adj,
        order: &order,
        parent_pos: &parent_pos,
        k,
        min_edge,
        assigned: vec![0; k],
        used: vec![false; n + 1],
        best: None,
        visited: 0,
        budget: limits.max_visited,
    };
    search.run(0, 0)?;
    Ok(search.best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::WeightKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> WeightedGraph {
        let mut g = WeightedGraph::new(3, true, WeightKind::Integer);
        g.add_edge(1, 2, 5.0).unwrap();
        g.add_edge(2, 3, 7.0).unwrap();
        g
    }

    #[test]
    fn path_graph_golden() {
        assert_eq!(oracle_min_kpath(&path3(), 3).unwrap(), Some((12, vec![1, 2, 3])));
    }

    #[test]
    fn k_larger_than_n_is_absent() {
        assert_eq!(oracle_min_kpath(&path3(), 4).unwrap(), None);
        assert!(oracle_kpath_weights(&path3(), 4).unwrap().is_empty());
    }

    #[test]
    fn complete_digraph_weight_2() {
        let mut g = WeightedGraph::new(4, true, WeightKind::Integer);
        for u in 1..=4 {
            for v in 1..=4 {
                if u != v {
                    g.add_edge(u, v, 1.0).unwrap();
                }
            }
        }
        let (w, seq) = oracle_min_kpath(&g, 3).unwrap().unwrap();
        assert_eq!(w, 2);
        assert_eq!(seq, vec![1, 2, 3]); // lexicographically smallest optimum
    }

    #[test]
    fn triangle_weight_set_golden() {
        let mut g = WeightedGraph::new(3, true, WeightKind::Integer);
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 3, 2.0).unwrap();
        g.add_edge(3, 1, 4.0).unwrap();
        let weights = oracle_kpath_weights(&g, 3).unwrap();
        assert_eq!(weights, BTreeSet::from([3, 5, 6]));
    }

    #[test]
    fn single_path_weight_set_is_singleton() {
        assert_eq!(oracle_kpath_weights(&path3(), 3).unwrap(), BTreeSet::from([12]));
    }

    #[test]
    fn min_is_member_of_weight_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let g = gen::random_digraph(8, 0.4, -5..=9, &mut rng);
            for k in 2..=4u32 {
                let weights = oracle_kpath_weights(&g, k).unwrap();
                match oracle_min_kpath(&g, k).unwrap() {
                    Some((w, seq)) => {
                        assert_eq!(weights.first(), Some(&w));
                        assert_eq!(seq.len(), k as usize);
                    }
                    None => assert!(weights.is_empty()),
                }
            }
        }
    }

    #[test]
    fn dp_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for i in 0..30 {
            let directed = i % 2 == 0;
            let g = if directed {
                gen::random_digraph(7, 0.45, -6..=6, &mut rng)
            } else {
                gen::random_ungraph(7, 0.45, -6..=6, &mut rng)
            };
            for k in 2..=5u32 {
                assert_eq!(
                    oracle_min_kpath(&g, k).unwrap(),
                    oracle_min_kpath_enumerated(&g, k).unwrap(),
                    "instance {i} k={k}"
                );
                assert_eq!(
                    oracle_kpath_weights(&g, k).unwrap(),
                    oracle_kpath_weights_enumerated(&g, k).unwrap(),
                    "instance {i} k={k}"
                );
            }
        }
    }

    #[test]
    fn tree_single_node_maps_anywhere_at_zero() {
        let t = TreePattern::new(1, vec![]).unwrap();
        let g = path3();
        let (w, mapping) = oracle_min_ktree(&g, &t).unwrap().unwrap();
        assert_eq!(w, 0);
        assert_eq!(mapping.len(), 1);
    }

    #[test]
    fn path_pattern_matches_kpath_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..15 {
            let g = gen::random_ungraph(7, 0.5, 1..=9, &mut rng);
            for k in 2..=4u32 {
                let t = TreePattern::path(k);
                let tree = oracle_min_ktree(&g, &t).unwrap().map(|(w, _)| w);
                let path = oracle_min_kpath(&g, k).unwrap().map(|(w, _)| w);
                assert_eq!(tree, path);
            }
        }
    }

    #[test]
    fn star_on_triangle_golden() {
        // star with centre 1 and leaves 2,3 on the weighted triangle:
        // best centre is the vertex shared by the two lightest edges.
        let mut g = WeightedGraph::new(3, false, WeightKind::Integer);
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 3, 2.0).unwrap();
        g.add_edge(1, 3, 4.0).unwrap();
        let t = TreePattern::new(3, vec![(1, 2), (1, 3)]).unwrap();
        let (w, mapping) = oracle_min_ktree(&g, &t).unwrap().unwrap();
        assert_eq!(w, 3);
        assert_eq!(mapping[0], 2); // centre maps to vertex 2
    }
}

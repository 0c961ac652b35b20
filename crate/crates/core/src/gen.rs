//! Deterministic random-instance generators for tests and the bench
//! harness. Everything is driven by a caller-supplied generator so that
//! instances replay exactly from a seed.

use crate::graph::{WeightKind, WeightedGraph};
use crate::ktree::TreePattern;
use rand::Rng;
use std::ops::RangeInclusive;

/// Directed graph: every ordered pair (u, v), u != v, carries an edge with
/// probability `edge_prob`, weighted uniformly from the range.
pub fn random_digraph(
    n: u32,
    edge_prob: f64,
    weights: RangeInclusive<i64>,
    rng: &mut impl Rng,
) -> WeightedGraph {
    let mut g = WeightedGraph::new(n, true, WeightKind::Integer);
    for u in 1..=n {
        for v in 1..=n {
            if u != v && rng.random_bool(edge_prob) {
                let w = rng.random_range(weights.clone());
                g.add_edge(u, v, w as f64).unwrap();
            }
        }
    }
    g
}

/// Undirected counterpart over unordered pairs.
pub fn random_ungraph(
    n: u32,
    edge_prob: f64,
    weights: RangeInclusive<i64>,
    rng: &mut impl Rng,
) -> WeightedGraph {
    let mut g = WeightedGraph::new(n, false, WeightKind::Integer);
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.random_bool(edge_prob) {
                let w = rng.random_range(weights.clone());
                g.add_edge(u, v, w as f64).unwrap();
            }
        }
    }
    g
}

/// Directed graph with real weights drawn uniformly from [lo, hi].
pub fn random_real_digraph(
    n: u32,
    edge_prob: f64,
    lo: f64,
    hi: f64,
    rng: &mut impl Rng,
) -> WeightedGraph {
    let mut g = WeightedGraph::new(n, true, WeightKind::Real);
    for u in 1..=n {
        for v in 1..=n {
            if u != v && rng.random_bool(edge_prob) {
                let w = rng.random_range(lo..=hi);
                g.add_edge(u, v, w).unwrap();
            }
        }
    }
    g
}

/// Uniform random tree on k nodes: node i attaches to a uniform earlier
/// node, then labels are left as-is (node 1 is the root).
pub fn random_tree(k: u32, rng: &mut impl Rng) -> TreePattern {
    let mut edges = Vec::new();
    for i in 2..=k {
        let parent = rng.random_range(1..i);
        edges.push((parent, i));
    }
    TreePattern::new(k, edges).unwrap()
}

/// A directed instance with a planted, strictly unique minimum k-path.
///
/// The planted path edges weigh 1..=3 each; every decoy edge weighs
/// 15..=30, so any k-path using a decoy is strictly heavier than the
/// plant. Returns the graph, the planted vertex order, and its weight.
pub fn planted_path_instance(
    n: u32,
    k: u32,
    decoy_prob: f64,
    rng: &mut impl Rng,
) -> (WeightedGraph, Vec<u32>, i64) {
    assert!(k >= 2 && n >= k);
    let mut vertices: Vec<u32> = (1..=n).collect();
    // partial Fisher-Yates: the first k entries become the planted path
    for i in 0..k as usize {
        let j = rng.random_range(i..n as usize);
        vertices.swap(i, j);
    }
    let planted: Vec<u32> = vertices[..k as usize].to_vec();
    let mut g = WeightedGraph::new(n, true, WeightKind::Integer);
    let mut weight = 0i64;
    for pair in planted.windows(2) {
        let w = rng.random_range(1..=3i64);
        weight += w;
        g.add_edge(pair[0], pair[1], w as f64).unwrap();
    }
    for u in 1..=n {
        for v in 1..=n {
            if u != v && rng.random_bool(decoy_prob) {
                let w = rng.random_range(15..=30i64);
                // first edge wins, so planted edges are never overwritten
                let _ = g.add_edge(u, v, w as f64).unwrap_or(false);
            }
        }
    }
    (g, planted, weight)
}

/// An undirected instance with a planted minimum-weight copy of the given
/// tree; light planted edges, heavy decoys. Returns the graph, the node ->
/// vertex embedding, and its weight.
pub fn planted_tree_instance(
    n: u32,
    t: &TreePattern,
    decoy_prob: f64,
    rng: &mut impl Rng,
) -> (WeightedGraph, Vec<u32>, i64) {
    let k = t.k();
    assert!(n >= k);
    let mut vertices: Vec<u32> = (1..=n).collect();
    for i in 0..k as usize {
        let j = rng.random_range(i..n as usize);
        vertices.swap(i, j);
    }
    let embedding: Vec<u32> = vertices[..k as usize].to_vec();
    let mut g = WeightedGraph::new(n, false, WeightKind::Integer);
    let mut weight = 0i64;
    for &(a, b) in t.edges() {
        let w = rng.random_range(1..=3i64);
        weight += w;
        g.add_edge(embedding[(a - 1) as usize], embedding[(b - 1) as usize], w as f64)
            .unwrap();
    }
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.random_bool(decoy_prob) {
                let w = rng.random_range(15..=30i64);
                let _ = g.add_edge(u, v, w as f64).unwrap_or(false);
            }
        }
    }
    (g, embedding, weight)
}

//! Weighted graphs on vertices 1..=n, directed or undirected, with integer
//! or real edge weights. Weights are stored as f64; integer mode asserts
//! integrality when solvers need exact degrees.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Integer,
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub weight: f64,
}

/// A directed arc with an exact integer weight, as consumed by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: u32,
    pub to: u32,
    pub weight: i64,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {v} out of range 1..={n}")]
    VertexOutOfRange { v: u32, n: u32 },
    #[error("edge weight {w} is not an integer but integer mode was requested")]
    NonIntegerWeight { w: f64 },
    #[error("edge weight {w} exceeds the supported magnitude")]
    WeightTooLarge { w: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: u32,
    directed: bool,
    weight_kind: WeightKind,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: u32, directed: bool, weight_kind: WeightKind) -> Self {
        WeightedGraph { n, directed, weight_kind, edges: Vec::new() }
    }

    /// Insert an edge. Returns false when the (oriented or unoriented) pair
    /// already exists; the first occurrence wins.
    pub fn add_edge(&mut self, from: u32, to: u32, weight: f64) -> Result<bool, GraphError> {
        for &v in &[from, to] {
            if v < 1 || v > self.n {
                return Err(GraphError::VertexOutOfRange { v, n: self.n });
            }
        }
        if !weight.is_finite() || weight.abs() > 1e13 {
            return Err(GraphError::WeightTooLarge { w: weight });
        }
        if self.find_edge(from, to).is_some() {
            return Ok(false);
        }
        self.edges.push(Edge { from, to, weight });
        Ok(true)
    }

    fn find_edge(&self, from: u32, to: u32) -> Option<&Edge> {
        self.edges.iter().find(|e| {
            (e.from == from && e.to == to)
                || (!self.directed && e.from == to && e.to == from)
        })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight_of(&self, from: u32, to: u32) -> Option<f64> {
        self.find_edge(from, to).map(|e| e.weight)
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight.abs()).fold(0.0, f64::max)
    }

    pub fn min_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).fold(f64::NEG_INFINITY, f64::max)
    }

    /// All directed arcs, both orientations for undirected graphs, sorted
    /// by (from, to). The sorted order fixes the randomness consumption
    /// order inside the solvers.
    pub fn arcs(&self) -> Result<Vec<Arc>, GraphError> {
        let mut arcs = Vec::with_capacity(self.edges.len() * 2);
        for e in &self.edges {
            let w = int_weight(e.weight)?;
            arcs.push(Arc { from: e.from, to: e.to, weight: w });
            if !self.directed && e.from != e.to {
                arcs.push(Arc { from: e.to, to: e.from, weight: w });
            }
        }
        arcs.sort_unstable_by_key(|a| (a.from, a.to));
        Ok(arcs)
    }

    /// Integer-mode validation: every weight must be exactly integral.
    pub fn require_integer_weights(&self) -> Result<(), GraphError> {
        for e in &self.edges {
            int_weight(e.weight)?;
        }
        Ok(())
    }

    /// Subgraph induced by the vertices with `keep[v-1]` set, relabelled to
    /// 1..=kept. Returns the new graph and the map from new ids to old ids.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (WeightedGraph, Vec<u32>) {
        assert_eq!(keep.len(), self.n as usize);
        let mut old_of_new = Vec::new();
        let mut new_of_old = vec![0u32; self.n as usize + 1];
        for v in 1..=self.n {
            if keep[(v - 1) as usize] {
                old_of_new.push(v);
                new_of_old[v as usize] = old_of_new.len() as u32;
            }
        }
        let mut sub = WeightedGraph::new(old_of_new.len() as u32, self.directed, self.weight_kind);
        for e in &self.edges {
            let nf = new_of_old[e.from as usize];
            let nt = new_of_old[e.to as usize];
            if nf != 0 && nt != 0 {
                sub.edges.push(Edge { from: nf, to: nt, weight: e.weight });
            }
        }
        (sub, old_of_new)
    }

    /// Copy with every weight replaced by `f(w)`; the weight kind of the
    /// result is the caller's claim.
    pub fn map_weights(&self, kind: WeightKind, f: impl Fn(f64) -> f64) -> WeightedGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { from: e.from, to: e.to, weight: f(e.weight) })
            .collect();
        WeightedGraph { n: self.n, directed: self.directed, weight_kind: kind, edges }
    }

    /// Copy retaining only edges where `pred(w)` holds.
    pub fn filter_edges(&self, pred: impl Fn(&Edge) -> bool) -> WeightedGraph {
        let edges = self.edges.iter().copied().filter(pred).collect();
        WeightedGraph { n: self.n, directed: self.directed, weight_kind: self.weight_kind, edges }
    }

    /// Remove the edge at the given position in `edges()`.
    pub fn remove_edge_at(&mut self, index: usize) {
        self.edges.remove(index);
    }
}

fn int_weight(w: f64) -> Result<i64, GraphError> {
    if w.fract() != 0.0 {
        return Err(GraphError::NonIntegerWeight { w });
    }
    if w.abs() > 1e13 {
        return Err(GraphError::WeightTooLarge { w });
    }
    Ok(w as i64)
}

//! Actual-path recovery: use the amplified weight solver as an oracle to
//! shrink the graph down to the k path vertices, then pin the order.
//!
//! While the graph is large, whole batches of vertices are deleted at
//! random (each vertex with probability 1/k) and a batch is kept whenever
//! enough vertices left and the solver still reports the original weight.
//! Below the shrink floor, plain self-reduction removes one vertex at a
//! time. The vertex order is then extracted by edge self-reduction:
//! delete edges while the answer is unchanged until exactly the k-1 path
//! edges remain.
//!
//! Every oracle call runs the capped solver at the known optimum d, which
//! is sound because deleting vertices or edges can only raise the
//! minimum, and cheaper because the degree dimension stays at d+1.

use crate::exact::{min_kpath_weight, ExactConfig, SolveError, SolveReport};
use crate::graph::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecoverError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("inner solver inconsistency: {0}")]
    OracleFailure(String),
    #[error("all {rounds} trials of a shrink round failed")]
    RecoveryFailed { rounds: u32 },
    #[error("edge self-reduction failed: {0}")]
    ExtractionFailed(String),
}

/// Knobs for the recovery loop. `None` fields resolve to the defaults
/// below, which depend on the instance size.
#[derive(Debug, Clone, Copy)]
pub struct RecoverConfig {
    pub inner: ExactConfig,
    /// Trials per shrink round; default ceil(4 ln n) + 8.
    pub retry_rounds: Option<u32>,
    /// Per-vertex deletion probability; default 1/k.
    pub removal_prob: Option<f64>,
    /// Vertex count at which self-reduction takes over; default 10k.
    pub shrink_floor: Option<u32>,
    /// A trial must remove at least this fraction of |V|/k vertices;
    /// default 1/2 (safely below the expectation of about 9/10).
    pub min_removed_fraction: Option<f64>,
}

impl RecoverConfig {
    pub fn new(inner: ExactConfig) -> Self {
        RecoverConfig {
            inner,
            retry_rounds: None,
            removal_prob: None,
            shrink_floor: None,
            min_removed_fraction: None,
        }
    }

    pub(crate) fn resolved(&self, n: u32) -> Knobs {
        let k = self.inner.k;
        Knobs {
            retry_rounds: self
                .retry_rounds
                .unwrap_or_else(|| (4.0 * f64::from(n.max(2)).ln()).ceil() as u32 + 8),
            removal_prob: self.removal_prob.unwrap_or(1.0 / f64::from(k)),
            shrink_floor: self.shrink_floor.unwrap_or(10 * k),
            min_removed_fraction: self.min_removed_fraction.unwrap_or(0.5),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Knobs {
    pub(crate) retry_rounds: u32,
    pub(crate) removal_prob: f64,
    pub(crate) shrink_floor: u32,
    pub(crate) min_removed_fraction: f64,
}

/// Derive the seed for the i-th oracle call from the base seed; a
/// splitmix-style stride keeps calls decorrelated but reproducible.
fn call_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// An amplified yes/no oracle for "does a k-path of weight exactly d
/// survive in this subgraph": the capped solver at bound d.
pub(crate) struct CappedOracle {
    inner: ExactConfig,
    d: i64,
    calls: u64,
}

impl CappedOracle {
    pub(crate) fn new(inner: ExactConfig, d: i64) -> Self {
        CappedOracle { inner, d, calls: 0 }
    }

    pub(crate) fn answers_d(&mut self, g: &WeightedGraph) -> Result<bool, SolveError> {
        self.calls += 1;
        let cfg = ExactConfig {
            seed: call_seed(self.inner.seed, self.calls),
            cap: Some(self.d as f64),
            ..self.inner
        };
        let report = min_kpath_weight(g, &cfg)?;
        match report.weight {
            // one-sidedness: a vertex-deleted subgraph cannot contain a
            // lighter path than the full graph's optimum
            Some(w) if w < self.d => Err(SolveError::Oracle(format!(
                "capped solver found weight {w} below the established optimum {}",
                self.d
            ))),
            Some(_) => Ok(true),
            None => Ok(false),
        }
    }
}

pub(crate) trait WeightOracle {
    fn answers_d(&mut self, g: &WeightedGraph) -> Result<bool, SolveError>;
}

impl WeightOracle for CappedOracle {
    fn answers_d(&mut self, g: &WeightedGraph) -> Result<bool, SolveError> {
        CappedOracle::answers_d(self, g)
    }
}

/// One shrink round: up to `retry_rounds` random-deletion trials; the
/// first trial that removes enough vertices and keeps the answer at d
/// wins. Returns the shrunk graph and the new->old id map, or `None` when
/// every trial failed.
pub(crate) fn shrink_round_with(
    g: &WeightedGraph,
    k: u32,
    knobs: &Knobs,
    oracle: &mut dyn WeightOracle,
    rng: &mut impl Rng,
) -> Result<Option<(WeightedGraph, Vec<u32>)>, RecoverError> {
    let n = g.n();
    let threshold = (knobs.min_removed_fraction * f64::from(n) / f64::from(k)).ceil() as u32;
    for _ in 0..knobs.retry_rounds {
        let keep: Vec<bool> = (0..n).map(|_| !rng.random_bool(knobs.removal_prob)).collect();
        let removed = keep.iter().filter(|&&kept| !kept).count() as u32;
        if removed < threshold.max(1) || n - removed < k {
            continue;
        }
        let (sub, ids) = g.induced_subgraph(&keep);
        if oracle.answers_d(&sub)? {
            return Ok(Some((sub, ids)));
        }
    }
    Ok(None)
}

/// Self-reduction below the shrink floor: delete one vertex at a time,
/// keeping the deletion whenever the solver still answers d, until
/// exactly k vertices remain.
pub(crate) fn self_reduce_with(
    g: &WeightedGraph,
    k: u32,
    oracle: &mut dyn WeightOracle,
) -> Result<(WeightedGraph, Vec<u32>), RecoverError> {
    let mut cur = g.clone();
    let mut ids: Vec<u32> = (1..=g.n()).collect();
    // A perfect oracle finishes in one pass: every vertex it keeps lies on
    // every surviving optimal path. Extra passes absorb the solver's
    // one-sided misses, which are unlikely to repeat on the same vertex.
    for _pass in 0..4 {
        if cur.n() == k {
            return Ok((cur, ids));
        }
        let mut progressed = false;
        let mut local = 1u32;
        while local <= cur.n() && cur.n() > k {
            let keep: Vec<bool> = (1..=cur.n()).map(|v| v != local).collect();
            let (sub, sub_ids) = cur.induced_subgraph(&keep);
            if oracle.answers_d(&sub)? {
                ids = sub_ids.iter().map(|&nv| ids[(nv - 1) as usize]).collect();
                cur = sub;
                progressed = true;
                // the vertex now at `local` is the next untested one
            } else {
                local += 1;
            }
        }
        if cur.n() == k {
            return Ok((cur, ids));
        }
        if !progressed {
            break;
        }
    }
    Err(RecoverError::OracleFailure(format!(
        "self-reduction stalled at {} vertices (target {k})",
        cur.n()
    )))
}

/// Shrink rounds followed by self-reduction, down to exactly k vertices.
pub(crate) fn reduce_to_k_vertices(
    g: &WeightedGraph,
    k: u32,
    knobs: &Knobs,
    oracle: &mut dyn WeightOracle,
    rng: &mut impl Rng,
) -> Result<(WeightedGraph, Vec<u32>), RecoverError> {
    let mut cur = g.clone();
    let mut ids: Vec<u32> = (1..=g.n()).collect();
    while cur.n() > knobs.shrink_floor {
        match shrink_round_with(&cur, k, knobs, oracle, rng)? {
            Some((sub, sub_ids)) => {
                ids = sub_ids.iter().map(|&nv| ids[(nv - 1) as usize]).collect();
                cur = sub;
            }
            None => return Err(RecoverError::RecoveryFailed { rounds: knobs.retry_rounds }),
        }
    }
    let (fin, fin_ids) = self_reduce_with(&cur, k, oracle)?;
    let ids = fin_ids.iter().map(|&nv| ids[(nv - 1) as usize]).collect();
    Ok((fin, ids))
}

/// Edge self-reduction on a k-vertex graph: delete edges while the answer
/// stays d until exactly the k-1 path edges remain, then read the order
/// off the degree-1 endpoints.
pub(crate) fn extract_order_with(
    g_k: &WeightedGraph,
    k: u32,
    d: i64,
    oracle: &mut dyn WeightOracle,
) -> Result<Vec<u32>, RecoverError> {
    let target_edges = (k - 1) as usize;
    let mut cur = g_k.clone();
    for _pass in 0..4 {
        if cur.edge_count() == target_edges {
            break;
        }
        let mut progressed = false;
        let mut idx = 0;
        while idx < cur.edge_count() && cur.edge_count() > target_edges {
            let mut pruned = cur.clone();
            pruned.remove_edge_at(idx);
            if oracle.answers_d(&pruned)? {
                cur = pruned;
                progressed = true;
            } else {
                idx += 1;
            }
        }
        if !progressed {
            break;
        }
    }
    if cur.edge_count() != target_edges {
        return Err(RecoverError::ExtractionFailed(format!(
            "{} edges remain, expected {target_edges}",
            cur.edge_count()
        )));
    }
    let order = order_from_path_edges(&cur, k).map_err(RecoverError::ExtractionFailed)?;
    let mut total = 0i64;
    for pair in order.windows(2) {
        match cur.weight_of(pair[0], pair[1]) {
            Some(w) => total += w as i64,
            None => {
                return Err(RecoverError::ExtractionFailed(format!(
                    "missing edge ({}, {}) in extracted path",
                    pair[0], pair[1]
                )))
            }
        }
    }
    if total != d {
        return Err(RecoverError::ExtractionFailed(format!(
            "extracted path weighs {total}, expected {d}"
        )));
    }
    Ok(order)
}

/// Interpret k-1 surviving edges as a simple path over all k vertices and
/// return the vertex order; undirected paths are oriented to the
/// lexicographically smaller of the two readings.
fn order_from_path_edges(g: &WeightedGraph, k: u32) -> Result<Vec<u32>, String> {
    let n = g.n();
    debug_assert_eq!(n, k);
    if g.directed() {
        let mut out_deg = vec![0u32; n as usize + 1];
        let mut in_deg = vec![0u32; n as usize + 1];
        let mut next = vec![0u32; n as usize + 1];
        for e in g.edges() {
            out_deg[e.from as usize] += 1;
            in_deg[e.to as usize] += 1;
            next[e.from as usize] = e.to;
        }
        if out_deg.iter().any(|&d| d > 1) || in_deg.iter().any(|&d| d > 1) {
            return Err("surviving edges branch".into());
        }
        let mut starts = (1..=n).filter(|&v| in_deg[v as usize] == 0 && out_deg[v as usize] > 0);
        let start = starts.next().ok_or("no path start among surviving edges")?;
        let mut order = vec![start];
        let mut v = start;
        while out_deg[v as usize] == 1 {
            v = next[v as usize];
            order.push(v);
            if order.len() > k as usize {
                return Err("surviving edges contain a cycle".into());
            }
        }
        if order.len() != k as usize {
            return Err(format!("path covers {} of {k} vertices", order.len()));
        }
        Ok(order)
    } else {
        let mut adj = vec![Vec::new(); n as usize + 1];
        for e in g.edges() {
            adj[e.from as usize].push(e.to);
            adj[e.to as usize].push(e.from);
        }
        let mut ends = (1..=n).filter(|&v| adj[v as usize].len() == 1);
        let start = ends.next().ok_or("no degree-1 endpoint")?;
        let mut order = vec![start];
        let mut prev = 0u32;
        let mut v = start;
        loop {
            let step = adj[v as usize].iter().copied().find(|&w| w != prev);
            match step {
                Some(w) => {
                    order.push(w);
                    prev = v;
                    v = w;
                    if order.len() > k as usize {
                        return Err("surviving edges contain a cycle".into());
                    }
                    if adj[v as usize].len() == 1 {
                        break;
                    }
                }
                None => break,
            }
        }
        if order.len() != k as usize {
            return Err(format!("path covers {} of {k} vertices", order.len()));
        }
        let reversed: Vec<u32> = order.iter().rev().copied().collect();
        Ok(if reversed < order { reversed } else { order })
    }
}

/// Public single-round shrink, as used inside `recover_path`.
pub fn shrink_round(
    g: &WeightedGraph,
    k: u32,
    d: i64,
    cfg: &RecoverConfig,
    rng: &mut impl Rng,
) -> Result<Option<(WeightedGraph, Vec<u32>)>, RecoverError> {
    let knobs = cfg.resolved(g.n());
    let mut oracle = CappedOracle::new(cfg.inner, d);
    shrink_round_with(g, k, &knobs, &mut oracle, rng)
}

/// Public self-reduction from at most 10k vertices down to exactly k.
pub fn self_reduce(
    g: &WeightedGraph,
    k: u32,
    d: i64,
    cfg: &RecoverConfig,
) -> Result<(WeightedGraph, Vec<u32>), RecoverError> {
    let mut oracle = CappedOracle::new(cfg.inner, d);
    self_reduce_with(g, k, &mut oracle)
}

/// Public order extraction on a k-vertex graph known to hold a d-path.
pub fn extract_order(
    g_k: &WeightedGraph,
    k: u32,
    d: i64,
    cfg: &RecoverConfig,
) -> Result<Vec<u32>, RecoverError> {
    let mut oracle = CappedOracle::new(cfg.inner, d);
    extract_order_with(g_k, k, d, &mut oracle)
}

/// Recover a path of the given weight on a graph where the amplified
/// answer is already known; used by the approximation driver on its final
/// scaled graph.
pub(crate) fn recover_path_of_weight(
    g: &WeightedGraph,
    k: u32,
    d: i64,
    inner: ExactConfig,
) -> Result<Vec<u32>, RecoverError> {
    let cfg = RecoverConfig::new(inner);
    let knobs = cfg.resolved(g.n());
    let mut oracle = CappedOracle::new(inner, d);
    let mut rng = ChaCha8Rng::seed_from_u64(call_seed(inner.seed, 0xFADE));
    let (g_k, ids) = reduce_to_k_vertices(g, k, &knobs, &mut oracle, &mut rng)?;
    let order = extract_order_with(&g_k, k, d, &mut oracle)?;
    Ok(order.iter().map(|&v| ids[(v - 1) as usize]).collect())
}

/// Full recovery: solve for the weight, then find a path achieving it.
pub fn recover_path(g: &WeightedGraph, cfg: &RecoverConfig) -> Result<SolveReport, RecoverError> {
    let start = Instant::now();
    let k = cfg.inner.k;
    let mut base = min_kpath_weight(g, &cfg.inner)?;
    let Some(d) = base.weight else {
        base.elapsed = start.elapsed();
        return Ok(base); // no k-path; nothing to recover
    };
    if k == 1 {
        base.elapsed = start.elapsed();
        return Ok(base); // vertices already filled by the solver
    }
    let vertices = recover_path_of_weight(g, k, d, cfg.inner)?;
    // end-to-end validation on the original graph
    let mut seen = std::collections::HashSet::new();
    let mut total = 0i64;
    for &v in &vertices {
        if !seen.insert(v) {
            return Err(RecoverError::OracleFailure("recovered path repeats a vertex".into()));
        }
    }
    for pair in vertices.windows(2) {
        match g.weight_of(pair[0], pair[1]) {
            Some(w) => total += w as i64,
            None => {
                return Err(RecoverError::OracleFailure(format!(
                    "recovered pair ({}, {}) is not an edge",
                    pair[0], pair[1]
                )))
            }
        }
    }
    if vertices.len() != k as usize || total != d {
        return Err(RecoverError::OracleFailure(format!(
            "recovered path has {} vertices and weight {total}, expected {k} and {d}",
            vertices.len()
        )));
    }
    Ok(SolveReport {
        weight: Some(d),
        vertices: Some(vertices),
        repetitions_used: cfg.inner.repetitions,
        seed: cfg.inner.seed,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::WeightKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inner(k: u32, seed: u64) -> ExactConfig {
        ExactConfig::new(k, 40, seed)
    }

    #[test]
    fn recovers_the_graph_that_is_a_path() {
        let mut g = WeightedGraph::new(4, true, WeightKind::Integer);
        g.add_edge(1, 2, 2.0).unwrap();
        g.add_edge(2, 3, 3.0).unwrap();
        g.add_edge(3, 4, 4.0).unwrap();
        let report = recover_path(&g, &RecoverConfig::new(inner(4, 1))).unwrap();
        assert_eq!(report.weight, Some(9));
        assert_eq!(report.vertices, Some(vec![1, 2, 3, 4]));
    }

    #[test]
    fn absence_is_reported_without_recovery() {
        let g = WeightedGraph::new(3, true, WeightKind::Integer);
        let report = recover_path(&g, &RecoverConfig::new(inner(2, 2))).unwrap();
        assert_eq!(report.weight, None);
        assert_eq!(report.vertices, None);
    }

    #[test]
    fn planted_unique_minimum_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for i in 0..6 {
            let (g, planted, w) = gen::planted_path_instance(30, 4, 0.12, &mut rng);
            let report = recover_path(&g, &RecoverConfig::new(inner(4, 500 + i))).unwrap();
            assert_eq!(report.weight, Some(w), "instance {i}");
            assert_eq!(report.vertices, Some(planted), "instance {i}");
        }
    }

    #[test]
    fn self_reduce_removes_isolated_vertex() {
        let mut g = WeightedGraph::new(4, true, WeightKind::Integer);
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 3, 1.0).unwrap();
        // vertex 4 is isolated
        let (g_k, ids) = self_reduce(&g, 3, 2, &RecoverConfig::new(inner(3, 4))).unwrap();
        assert_eq!(g_k.n(), 3);
        assert_eq!(ids, vec![1, 2, 3]);
    }

    #[test]
    fn extract_order_on_bare_path_and_with_chord() {
        let mut bare = WeightedGraph::new(3, true, WeightKind::Integer);
        bare.add_edge(1, 2, 1.0).unwrap();
        bare.add_edge(2, 3, 2.0).unwrap();
        let cfg = RecoverConfig::new(inner(3, 5));
        assert_eq!(extract_order(&bare, 3, 3, &cfg).unwrap(), vec![1, 2, 3]);

        let mut chord = bare.clone();
        chord.add_edge(1, 3, 10.0).unwrap(); // heavier chord must be deleted
        assert_eq!(extract_order(&chord, 3, 3, &cfg).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn extract_order_on_random_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        let mut tested = 0;
        for i in 0..12 {
            let g = gen::random_digraph(5, 0.6, 1..=9, &mut rng);
            let opt = crate::oracle::oracle_min_kpath(&g, 5).unwrap();
            let Some((d, _)) = opt else { continue };
            tested += 1;
            let cfg = RecoverConfig::new(inner(5, 900 + i));
            let order = extract_order(&g, 5, d, &cfg).unwrap();
            let mut total = 0i64;
            for pair in order.windows(2) {
                total += g.weight_of(pair[0], pair[1]).unwrap() as i64;
            }
            assert_eq!(total, d);
            let mut sorted = order.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 5);
        }
        assert!(tested >= 3, "want a few instances that actually have 5-paths");
    }

    #[test]
    fn shrink_rounds_engage_on_large_graphs() {
        // n = 100 > 10k = 40, so at least one shrink round must run
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (g, planted, w) = gen::planted_path_instance(100, 4, 0.05, &mut rng);
        let cfg = RecoverConfig::new(ExactConfig::new(4, 32, 1234));
        let report = recover_path(&g, &cfg).unwrap();
        assert_eq!(report.weight, Some(w));
        assert_eq!(report.vertices, Some(planted));
    }

    #[test]
    fn shrink_round_statistics_match_the_analysis() {
        // With removal probability 1/k: the optimum's k vertices all
        // survive with probability (1-1/k)^k >= 1/4, and conditioned on
        // that the expected removal count is (n-k)/k.
        let n = 200u32;
        let k = 4u32;
        let planted: Vec<u32> = vec![3, 50, 120, 199];
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 20_000;
        let mut survived = 0u32;
        let mut removed_given_survival = 0u64;
        for _ in 0..trials {
            let keep: Vec<bool> = (0..n).map(|_| !rng.random_bool(1.0 / f64::from(k))).collect();
            let path_alive = planted.iter().all(|&v| keep[(v - 1) as usize]);
            let removed = keep.iter().filter(|&&x| !x).count() as u64;
            if path_alive {
                survived += 1;
                removed_given_survival += removed;
            }
        }
        let survival_rate = f64::from(survived) / f64::from(trials);
        assert!(survival_rate >= 0.25, "survival rate {survival_rate}");
        let mean_removed = removed_given_survival as f64 / f64::from(survived);
        let expect = f64::from(n - k) / f64::from(k);
        assert!((mean_removed - expect).abs() < 2.0, "mean {mean_removed} vs {expect}");
        // and the acceptance threshold |V|/(2k) sits well below it
        assert!(mean_removed >= f64::from(n) / f64::from(2 * k));
    }
}

//! The randomized exact k-path weight solver.
//!
//! One run evaluates the walk-generating polynomial
//! P'(z) = 1 . B_1 ... B_{k-1} . x at x_i = 1_G + v_i with fresh random
//! field scalars per (arc, layer), as k-1 vector-matrix products followed
//! by the closing multiplication with x. Non-simple walks vanish
//! deterministically in characteristic 2, so any surviving minimum degree
//! is the weight of a genuine simple k-path; with probability at least
//! 1/5 it is the optimum. Amplification takes the minimum over
//! independent repetitions whose generators derive from (seed, index), so
//! repetitions are order-independent and parallelizable.

use crate::graph::{GraphError, WeightKind, WeightedGraph};
use crate::ring::{GroupVector, RingElement, RingParams};
use crate::gf2e::{mul_table, MulTable, F_ONE};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc as StdArc;
use std::time::{Duration, Instant};
use thiserror::Error;

pub const MAX_K: u32 = 24;

/// Ring tables larger than this many field entries are refused rather
/// than silently allocating unbounded memory.
const MAX_RING_ENTRIES: usize = 1 << 28;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("k={k} out of supported range 1..={max}")]
    KOutOfRange { k: u32, max: u32 },
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("solver requires integer weights; parse weights without decimal points or use approx")]
    RealWeights,
    #[error("weight {w} outside the declared bound {bound}")]
    DeclaredBoundTooSmall { w: i64, bound: i64 },
    #[error("bounded solver requires nonnegative weights, found {w}")]
    NegativeWeight { w: i64 },
    #[error("weight cap must be nonnegative, got {cap}")]
    NegativeCap { cap: f64 },
    #[error("approximation requires weights in [1, M], found {w}")]
    WeightBelowOne { w: f64 },
    #[error("epsilon must be positive, got {eps}")]
    NonPositiveEpsilon { eps: f64 },
    #[error("ring table would need {entries} entries (limit {limit}); reduce k, weights, or the cap")]
    RingTooLarge { entries: u128, limit: usize },
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("approximation failed to produce a consistent answer after retries: {0}")]
    ApproxInconsistent(String),
    #[error("oracle error: {0}")]
    Oracle(String),
    #[error("tree has {tree_k} nodes but the configuration says k={config_k}")]
    TreeSizeMismatch { tree_k: u32, config_k: u32 },
}

/// Configuration of the exact solver.
#[derive(Debug, Clone, Copy)]
pub struct ExactConfig {
    /// Number of path vertices.
    pub k: u32,
    /// Amplification count; overall miss probability is at most (4/5)^r.
    pub repetitions: u32,
    pub seed: u64,
    /// Optional weight cap B: edges heavier than B are dropped and degrees
    /// are truncated above floor(B).
    pub cap: Option<f64>,
    /// Optional declared weight bound M; inferred from the graph when
    /// absent. Affects only the negative-weight shift.
    pub declared_m: Option<i64>,
}

impl ExactConfig {
    pub fn new(k: u32, repetitions: u32, seed: u64) -> Self {
        ExactConfig { k, repetitions, seed, cap: None, declared_m: None }
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Outcome of a solve. `weight` is on the original (unshifted) scale and
/// present exactly when a k-path (of weight within the cap, if any) was
/// found. `vertices` stays empty until recovery fills it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub weight: Option<i64>,
    pub vertices: Option<Vec<u32>>,
    pub repetitions_used: u32,
    pub seed: u64,
    pub elapsed: Duration,
}

/// Re-map weights into [0, 2M] by adding M to every edge. Every k-path
/// gains exactly (k-1)M, so the order relation on k-path weights is
/// preserved; the returned offset is what to subtract from weights
/// measured on the shifted graph.
pub fn shift_weights(
    g: &WeightedGraph,
    k: u32,
    declared_m: Option<i64>,
) -> Result<(WeightedGraph, i64), SolveError> {
    g.require_integer_weights().map_err(|_| SolveError::RealWeights)?;
    let max_abs = g.max_abs_weight() as i64;
    let m = declared_m.unwrap_or(max_abs);
    if max_abs > m {
        return Err(SolveError::DeclaredBoundTooSmall { w: max_abs, bound: m });
    }
    let shifted = g.map_weights(WeightKind::Integer, |w| w + m as f64);
    let offset = i64::from(k.saturating_sub(1)) * m;
    Ok((shifted, offset))
}

/// A prepared instance: shifted nonnegative arcs, the ring shape, and the
/// per-repetition evaluation order. Construction fixes everything that
/// does not depend on the random stream.
pub struct WalkEvaluator {
    k: u32,
    n: usize,
    arcs: Vec<(usize, usize, usize)>, // from, to, shifted weight
    params: RingParams,
    table: StdArc<MulTable>,
    offset: i64,
    /// Degrees above this are unreachable under the cap (inclusive bound
    /// on reportable shifted weight).
    max_degree: usize,
    /// Maximum shifted arc weight; bounds the degree growth per layer.
    max_arc_weight: usize,
}

impl WalkEvaluator {
    /// Prepare a graph for solving. Negative weights trigger the +M shift;
    /// a cap deletes heavier edges and truncates the degree dimension.
    pub fn prepare(g: &WeightedGraph, cfg: &ExactConfig) -> Result<Option<Self>, SolveError> {
        let k = cfg.k;
        if k < 2 || k > MAX_K {
            return Err(SolveError::KOutOfRange { k, max: MAX_K });
        }
        if (g.n() as usize) < k as usize {
            return Ok(None); // no simple k-path can exist
        }
        g.require_integer_weights().map_err(|_| SolveError::RealWeights)?;

        let needs_shift = g.min_weight() < 0.0;
        let (shifted, offset) = if needs_shift {
            shift_weights(g, k, cfg.declared_m)?
        } else {
            (g.clone(), 0)
        };
        let mut arcs = shifted.arcs()?;
        for a in &arcs {
            if a.weight < 0 {
                return Err(SolveError::NegativeWeight { w: a.weight });
            }
        }

        // The cap is stated on the original scale; a path of original
        // weight <= B has shifted weight <= B + offset. A cap below every
        // representable weight leaves nothing to find.
        let cap_shifted: Option<i64> = cfg.cap.map(|b| b.floor() as i64 + offset);
        if let Some(cb) = cap_shifted {
            if cb < 0 {
                return Ok(None);
            }
            // An edge heavier than the cap can never sit on a capped path.
            arcs.retain(|a| a.weight <= cb);
        }

        let max_w = arcs.iter().map(|a| a.weight).max().unwrap_or(0) as usize;
        let natural = (k as usize - 1) * max_w + 1;
        let degree_cap = match cap_shifted {
            Some(cb) => natural.min(cb as usize + 1),
            None => natural,
        };
        let entries = (1u128 << k) * degree_cap as u128;
        if entries > MAX_RING_ENTRIES as u128 {
            return Err(SolveError::RingTooLarge { entries, limit: MAX_RING_ENTRIES });
        }
        let params = RingParams::new(k, degree_cap);
        let table = mul_table(params.field());
        let arcs = arcs
            .iter()
            .map(|a| ((a.from - 1) as usize, (a.to - 1) as usize, a.weight as usize))
            .collect();
        Ok(Some(WalkEvaluator {
            k,
            n: g.n() as usize,
            arcs,
            params,
            table,
            offset,
            max_degree: degree_cap - 1,
            max_arc_weight: max_w,
        }))
    }

    pub fn ring_params(&self) -> RingParams {
        self.params
    }

    /// One full evaluation of P'(z) from the given stream: draw the n
    /// group vectors, then one fresh field scalar per (arc, layer) in
    /// sorted arc order, then close with the x-vector multiplication.
    pub fn evaluate(&self, rng: &mut impl RngCore) -> RingElement {
        let field = self.params.field();
        let full_cap = self.params.cap();
        let vectors: Vec<GroupVector> =
            (0..self.n).map(|_| self.params.random_vector(rng)).collect();
        // degrees after `layer` arc steps are at most layer * max weight,
        // so early layers run on much narrower tables
        let cap_after = |layer: usize| -> usize {
            full_cap.min(layer.saturating_mul(self.max_arc_weight) + 1)
        };
        let mut state: Vec<RingElement> = {
            let p0 = RingParams::new(self.k, 1);
            (0..self.n).map(|_| RingElement::one(p0)).collect()
        };
        let mut live = vec![true; self.n];
        for layer in 1..self.k as usize {
            let params = RingParams::new(self.k, cap_after(layer));
            let mut next: Vec<RingElement> =
                (0..self.n).map(|_| RingElement::zero(params)).collect();
            let mut next_live = vec![false; self.n];
            for &(from, to, w) in &self.arcs {
                // always consume one draw per arc so the stream layout is
                // independent of intermediate values
                let y = field.random(rng);
                if live[from] && w <= self.max_degree && !y.is_zero() {
                    next[to].accumulate_monomial(&state[from], y, vectors[from], w);
                    next_live[to] = true;
                }
            }
            state = next;
            live = next_live;
        }
        let mut acc = RingElement::zero(self.params);
        for j in 0..self.n {
            if live[j] {
                acc.accumulate_monomial(&state[j], F_ONE, vectors[j], 0);
            }
        }
        let _ = &self.table; // kept alive for the whole evaluation
        acc
    }

    /// One run: evaluate, read the minimum surviving degree, and map it
    /// back through the shift offset.
    pub fn run_once(&self, rng: &mut impl RngCore) -> Option<i64> {
        self.evaluate(rng)
            .min_degree()
            .map(|(d, _, _)| d as i64 - self.offset)
    }

    fn rep_rng(seed: u64, rep: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(rep));
        rng
    }

    /// Amplified minimum over `repetitions` independent runs.
    pub fn run_amplified(&self, seed: u64, repetitions: u32) -> Option<i64> {
        (0..repetitions)
            .into_par_iter()
            .map(|rep| self.run_once(&mut Self::rep_rng(seed, rep)))
            .flatten()
            .min()
    }
}

/// The value P'(z) for a nonnegative-integer-weight graph, exposed for
/// direct inspection in tests; `cap` is the number of retained degrees.
pub fn evaluate_walk_polynomial(
    g: &WeightedGraph,
    k: u32,
    rng: &mut impl RngCore,
    cap: usize,
) -> Result<RingElement, SolveError> {
    let cfg = ExactConfig::new(k, 1, 0).with_cap(cap.saturating_sub(1) as f64);
    match WalkEvaluator::prepare(g, &cfg)? {
        Some(ev) => Ok(ev.evaluate(rng)),
        None => Ok(RingElement::zero(RingParams::new(k, cap))),
    }
}

/// A single unamplified run. A returned weight is always the weight of
/// some genuine simple k-path; with probability at least 1/5 it is the
/// optimum.
pub fn min_kpath_weight_once(
    g: &WeightedGraph,
    k: u32,
    rng: &mut impl RngCore,
    cap: Option<f64>,
) -> Result<Option<i64>, SolveError> {
    let mut cfg = ExactConfig::new(k, 1, 0);
    cfg.cap = cap;
    match WalkEvaluator::prepare(g, &cfg)? {
        Some(ev) => Ok(ev.run_once(rng)),
        None => Ok(None),
    }
}

/// The amplified solver: minimum over `cfg.repetitions` runs, each with
/// failure probability at most 4/5, so the overall miss probability is at
/// most (4/5)^repetitions.
pub fn min_kpath_weight(g: &WeightedGraph, cfg: &ExactConfig) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    if cfg.repetitions < 1 {
        return Err(SolveError::NoRepetitions);
    }
    if cfg.k == 0 || cfg.k > MAX_K {
        return Err(SolveError::KOutOfRange { k: cfg.k, max: MAX_K });
    }
    if cfg.k == 1 {
        // a 1-path is a single vertex of weight zero; the ring machinery
        // is bypassed
        g.require_integer_weights().map_err(|_| SolveError::RealWeights)?;
        let found = g.n() >= 1;
        return Ok(SolveReport {
            weight: found.then_some(0),
            vertices: found.then(|| vec![1]),
            repetitions_used: cfg.repetitions,
            seed: cfg.seed,
            elapsed: start.elapsed(),
        });
    }
    let weight = match WalkEvaluator::prepare(g, cfg)? {
        Some(ev) => ev.run_amplified(cfg.seed, cfg.repetitions),
        None => None,
    };
    Ok(SolveReport {
        weight,
        vertices: None,
        repetitions_used: cfg.repetitions,
        seed: cfg.seed,
        elapsed: start.elapsed(),
    })
}

/// The degree-capped variant: exact among solutions of weight at most
/// `bound`, reporting absence otherwise. Requires nonnegative weights.
pub fn bounded_min_kpath_weight(
    g: &WeightedGraph,
    bound: f64,
    cfg: &ExactConfig,
) -> Result<SolveReport, SolveError> {
    if bound < 0.0 {
        return Err(SolveError::NegativeCap { cap: bound });
    }
    g.require_integer_weights().map_err(|_| SolveError::RealWeights)?;
    if g.min_weight() < 0.0 {
        return Err(SolveError::NegativeWeight { w: g.min_weight() as i64 });
    }
    let mut capped = *cfg;
    capped.cap = Some(bound);
    min_kpath_weight(g, &capped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle;
    use crate::ring::RingElement;

    fn path3() -> WeightedGraph {
        let mut g = WeightedGraph::new(3, true, WeightKind::Integer);
        g.add_edge(1, 2, 5.0).unwrap();
        g.add_edge(2, 3, 7.0).unwrap();
        g
    }

    #[test]
    fn shift_keeps_order_and_offset() {
        let mut g = WeightedGraph::new(3, true, WeightKind::Integer);
        g.add_edge(1, 2, -3.0).unwrap();
        g.add_edge(2, 3, 4.0).unwrap();
        let (shifted, offset) = shift_weights(&g, 3, None).unwrap();
        assert_eq!(shifted.weight_of(1, 2), Some(1.0));
        assert_eq!(shifted.weight_of(2, 3), Some(8.0));
        assert_eq!(offset, 8);
        assert_eq!(9 - offset, 1); // shifted path weight maps back
    }

    #[test]
    fn shift_applies_even_when_nonnegative() {
        let (shifted, offset) = shift_weights(&path3(), 3, Some(7)).unwrap();
        assert_eq!(shifted.weight_of(1, 2), Some(12.0));
        assert_eq!(shifted.weight_of(2, 3), Some(14.0));
        assert_eq!(offset, 14);
    }

    #[test]
    fn shift_of_empty_graph_is_vacuous() {
        let g = WeightedGraph::new(4, true, WeightKind::Integer);
        let (shifted, offset) = shift_weights(&g, 3, Some(5)).unwrap();
        assert_eq!(shifted.edge_count(), 0);
        assert_eq!(offset, 10);
    }

    #[test]
    fn no_edges_means_zero_polynomial() {
        let g = WeightedGraph::new(3, true, WeightKind::Integer);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = evaluate_walk_polynomial(&g, 2, &mut rng, 4).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn single_edge_survives_at_its_weight() {
        let mut g = WeightedGraph::new(2, true, WeightKind::Integer);
        g.add_edge(1, 2, 5.0).unwrap();
        let mut hits = 0;
        for rep in 0..60 {
            let mut rng = WalkEvaluator::rep_rng(9, rep);
            let p = evaluate_walk_polynomial(&g, 2, &mut rng, 6).unwrap();
            if let Some((d, _, _)) = p.min_degree() {
                assert_eq!(d, 5);
                hits += 1;
            }
        }
        assert!(hits > 0, "the unique walk should survive some repetition");
    }

    #[test]
    fn two_cycle_walks_cancel_deterministically() {
        // the only 3-walks traverse 1->2->1 or 2->1->2; both are
        // non-simple, so the polynomial is exactly zero in every run
        let mut g = WeightedGraph::new(3, true, WeightKind::Integer);
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 1, 1.0).unwrap();
        for rep in 0..20 {
            let mut rng = WalkEvaluator::rep_rng(5, rep);
            let p = evaluate_walk_polynomial(&g, 3, &mut rng, 3).unwrap();
            assert!(p.is_zero(), "rep {rep}");
        }
    }

    #[test]
    fn unique_path_weight_is_always_12() {
        let g = path3();
        let mut returned = 0;
        for rep in 0..60 {
            let mut rng = WalkEvaluator::rep_rng(3, rep);
            if let Some(w) = min_kpath_weight_once(&g, 3, &mut rng, None).unwrap() {
                assert_eq!(w, 12);
                returned += 1;
            }
        }
        assert!(returned > 0);
    }

    #[test]
    fn k_above_n_is_absent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(min_kpath_weight_once(&path3(), 4, &mut rng, None).unwrap(), None);
        let report = min_kpath_weight(&path3(), &ExactConfig::new(4, 8, 1)).unwrap();
        assert_eq!(report.weight, None);
    }

    #[test]
    fn amplified_matches_oracle_on_random_digraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..15 {
            let g = gen::random_digraph(8, 0.5, 0..=10, &mut rng);
            let cfg = ExactConfig::new(4, 60, 1000 + i);
            let got = min_kpath_weight(&g, &cfg).unwrap().weight;
            let want = oracle::oracle_min_kpath(&g, 4).unwrap().map(|(w, _)| w);
            assert_eq!(got, want, "instance {i}");
        }
    }

    #[test]
    fn negative_weights_are_shifted_internally() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for i in 0..10 {
            let g = gen::random_digraph(8, 0.5, -10..=10, &mut rng);
            let cfg = ExactConfig::new(4, 60, 2000 + i);
            let got = min_kpath_weight(&g, &cfg).unwrap().weight;
            let want = oracle::oracle_min_kpath(&g, 4).unwrap().map(|(w, _)| w);
            assert_eq!(got, want, "instance {i}");
        }
    }

    #[test]
    fn no_kpath_is_reported_absent_always() {
        // two disconnected edges cannot carry a 3-path
        let mut g = WeightedGraph::new(4, true, WeightKind::Integer);
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(3, 4, 1.0).unwrap();
        for seed in 0..20 {
            let report = min_kpath_weight(&g, &ExactConfig::new(3, 10, seed)).unwrap();
            assert_eq!(report.weight, None);
        }
    }

    #[test]
    fn same_seed_replays_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = gen::random_digraph(9, 0.4, 0..=8, &mut rng);
        let cfg = ExactConfig::new(4, 20, 0xC0FFEE);
        let a = min_kpath_weight(&g, &cfg).unwrap();
        let b = min_kpath_weight(&g, &cfg).unwrap();
        assert_eq!(a.weight, b.weight);
        assert_eq!(a.repetitions_used, b.repetitions_used);
        assert_eq!(a.seed, b.seed);
    }

    #[test]
    fn k_equals_one_bypasses_the_ring() {
        let report = min_kpath_weight(&path3(), &ExactConfig::new(1, 5, 9)).unwrap();
        assert_eq!(report.weight, Some(0));
        assert_eq!(report.vertices, Some(vec![1]));
    }

    #[test]
    fn bounded_solver_respects_the_cap() {
        let mut g = WeightedGraph::new(3, true, WeightKind::Integer);
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 3, 1.0).unwrap();
        let cfg = ExactConfig::new(3, 40, 11);
        let below = bounded_min_kpath_weight(&g, 1.0, &cfg).unwrap();
        assert_eq!(below.weight, None); // the only path weighs 2 > 1
        let at = bounded_min_kpath_weight(&g, 2.0, &cfg).unwrap();
        assert_eq!(at.weight, Some(2));
    }

    #[test]
    fn loose_cap_equals_uncapped() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..10 {
            let g = gen::random_digraph(8, 0.5, 0..=9, &mut rng);
            let cfg = ExactConfig::new(4, 40, 3000 + i);
            let uncapped = min_kpath_weight(&g, &cfg).unwrap().weight;
            let capped = bounded_min_kpath_weight(&g, 27.0, &cfg).unwrap().weight;
            assert_eq!(uncapped, capped, "instance {i}");
        }
    }

    #[test]
    fn vector_chain_matches_full_matrix_product() {
        // tiny sizes: evaluate 1.B1...B_{k-1}.x by explicit matrix-chain
        // multiplication with the same randomness and compare
        let mut outer = ChaCha8Rng::seed_from_u64(12);
        for case in 0..8 {
            let g = gen::random_digraph(4, 0.7, 0..=3, &mut outer);
            let k = 3u32;
            let cfg = ExactConfig::new(k, 1, 0);
            let ev = match WalkEvaluator::prepare(&g, &cfg).unwrap() {
                Some(ev) => ev,
                None => continue,
            };
            let params = ev.ring_params();
            let n = g.n() as usize;

            let seed = 400 + case;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let chain = ev.evaluate(&mut rng);

            // replay the identical draw order: vectors first, then one y
            // per (arc, layer) in sorted arc order
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vectors: Vec<GroupVector> =
                (0..n).map(|_| params.random_vector(&mut rng)).collect();
            let field = params.field();
            let arcs = ev.arcs.clone();
            let mut matrices = Vec::new();
            for _layer in 1..k {
                let mut mat =
                    vec![vec![RingElement::zero(params); n]; n];
                for &(from, to, w) in &arcs {
                    let y = field.random(&mut rng);
                    let one = RingElement::one(params);
                    mat[from][to] = one.mul_monomial(y, vectors[from], w);
                }
                matrices.push(mat);
            }
            // row vector of ones times the chain
            let mut row: Vec<RingElement> =
                (0..n).map(|_| RingElement::one(params)).collect();
            for mat in &matrices {
                let mut next: Vec<RingElement> =
                    (0..n).map(|_| RingElement::zero(params)).collect();
                for (i, row_i) in row.iter().enumerate() {
                    for j in 0..n {
                        next[j].add_assign(&row_i.mul_naive(&mat[i][j]));
                    }
                }
                row = next;
            }
            let mut full = RingElement::zero(params);
            for (j, row_j) in row.iter().enumerate() {
                let x_j = RingElement::one(params).mul_monomial(F_ONE, vectors[j], 0);
                full.add_assign(&row_j.mul_naive(&x_j));
            }
            assert_eq!(chain, full, "case {case}");
        }
    }
}

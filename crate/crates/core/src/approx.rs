//! (1+eps)-approximation for real weights in [1, M] by adaptive scaling.
//!
//! The loop keeps bracketing bounds L <= OPT <= U. Each iteration probes
//! the geometric mean X = sqrt(LU): edge weights are floored by the
//! divisor delta*U/k' (delta = (L/U)^{1/3} - sqrt(L/U)), the capped exact
//! solver answers whether a scaled path of weight at most X/divisor
//! exists, and the success branch sets U <- X + delta*U while the failure
//! branch sets L <- X. Either way U/L contracts with exponent 2/3, so the
//! loop ends with U <= 2L after O(log log M) iterations. A final capped
//! call at divisor eps*L/k' pins the answer to within eps*L <= eps*OPT.
//!
//! The driver is generic over the bounded solver, so the same loop serves
//! both k-path and k-tree.

use crate::exact::{
    bounded_min_kpath_weight, min_kpath_weight, ExactConfig, SolveError,
};
use crate::graph::{WeightKind, WeightedGraph};
use crate::recover;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy)]
pub struct ApproxConfig {
    pub k: u32,
    pub epsilon: f64,
    pub seed: u64,
    /// Settings for every inner bounded-solver call (repetitions drive the
    /// per-call failure probability).
    pub inner: ExactConfig,
}

impl ApproxConfig {
    pub fn new(k: u32, epsilon: f64, seed: u64, repetitions: u32) -> Self {
        ApproxConfig { k, epsilon, seed, inner: ExactConfig::new(k, repetitions, seed) }
    }
}

/// The bracketing state of the scaling loop.
#[derive(Debug, Clone, Copy)]
pub struct ScaleState {
    pub lower: f64,
    pub upper: f64,
    /// k' = k-1, the edge count of a k-path.
    pub k_edges: u32,
    pub iteration: u32,
}

impl ScaleState {
    pub fn initial(k: u32, max_weight: f64) -> Self {
        let k_edges = k - 1;
        ScaleState {
            lower: f64::from(k_edges),
            upper: f64::from(k_edges) * max_weight,
            k_edges,
            iteration: 0,
        }
    }

    /// The probe point X = sqrt(LU) and the scaling coefficient
    /// delta = (L/U)^(1/3) - sqrt(L/U).
    pub fn proposal(&self) -> (f64, f64) {
        let ratio = self.lower / self.upper;
        ((self.lower * self.upper).sqrt(), ratio.cbrt() - ratio.sqrt())
    }

    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

/// One record per loop iteration: the probe, the verdict, and the bounds
/// after the update.
#[derive(Debug, Clone, Copy)]
pub struct ApproxIteration {
    pub x: f64,
    pub delta: f64,
    pub cap: f64,
    pub found: bool,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct ApproxReport {
    /// True weight (original scale) of the returned path; within (1+eps)
    /// of the optimum. Absent when no k-path exists.
    pub weight: Option<f64>,
    pub vertices: Option<Vec<u32>>,
    pub iterations: Vec<ApproxIteration>,
    pub repetitions: u32,
    pub seed: u64,
    pub elapsed: Duration,
}

/// Floor every weight by the divisor, yielding integer weights. The same
/// divisor must be used to interpret results: the effective weight
/// divisor * floor(w / divisor) satisfies w_eff <= w <= w_eff + divisor.
pub fn scale_weights(g: &WeightedGraph, divisor: f64) -> WeightedGraph {
    assert!(divisor > 0.0, "divisor must be positive");
    g.map_weights(WeightKind::Integer, |w| (w / divisor).floor())
}

/// One bracketing refinement against the bounded k-path solver; exposed
/// for direct inspection of the contraction behaviour.
pub fn refine_bounds(
    state: &ScaleState,
    g: &WeightedGraph,
    cfg: &ApproxConfig,
) -> Result<(ScaleState, ApproxIteration), SolveError> {
    let mut calls = 0u64;
    let mut bounded = |gs: &WeightedGraph, cap: f64| -> Result<Option<i64>, SolveError> {
        calls += 1;
        let inner = ExactConfig {
            seed: cfg.seed.wrapping_add(calls.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            ..cfg.inner
        };
        bounded_min_kpath_weight(gs, cap, &inner).map(|r| r.weight)
    };
    refine_step(state, g, &mut bounded)
}

fn refine_step(
    state: &ScaleState,
    g: &WeightedGraph,
    bounded: &mut dyn FnMut(&WeightedGraph, f64) -> Result<Option<i64>, SolveError>,
) -> Result<(ScaleState, ApproxIteration), SolveError> {
    assert!(state.upper > 2.0 * state.lower, "loop precondition U > 2L");
    let (x, delta) = state.proposal();
    // the invariant L < X < X + delta*U < U (X + delta*U = L^(1/3) U^(2/3))
    assert!(state.lower < x && x < x + delta * state.upper && x + delta * state.upper < state.upper);
    let k_edges = f64::from(state.k_edges);
    let divisor = delta * state.upper / k_edges;
    let scaled = scale_weights(g, divisor);
    let cap = x / divisor;
    // the loop keeps its solver calls cheap: with U > 2L the cap is
    // k' / ((U/L)^(1/6) - 1) < 8.2 k'
    debug_assert!(cap <= 8.2 * k_edges);
    let found = bounded(&scaled, cap)?.is_some();
    let next = if found {
        ScaleState { upper: x + delta * state.upper, iteration: state.iteration + 1, ..*state }
    } else {
        ScaleState { lower: x, iteration: state.iteration + 1, ..*state }
    };
    let record = ApproxIteration { x, delta, cap, found, lower: next.lower, upper: next.upper };
    Ok((next, record))
}

pub(crate) struct DriverOutcome {
    pub vertices: Vec<u32>,
    pub weight: f64,
    pub iterations: Vec<ApproxIteration>,
}

/// The scaling loop over an abstract bounded solver. `finish` receives
/// the final scaled graph and the scaled optimum and must return the
/// solution (vertices and true original weight). Returns `None` when no
/// k-subgraph exists at all.
pub(crate) fn approx_driver(
    g: &WeightedGraph,
    k: u32,
    eps: f64,
    exists: &mut dyn FnMut() -> Result<bool, SolveError>,
    bounded: &mut dyn FnMut(&WeightedGraph, f64) -> Result<Option<i64>, SolveError>,
    finish: &mut dyn FnMut(&WeightedGraph, i64) -> Result<(Vec<u32>, f64), SolveError>,
) -> Result<Option<DriverOutcome>, SolveError> {
    debug_assert!(k >= 2);
    if g.n() < k || (g.edge_count() as u32) < k - 1 {
        return Ok(None);
    }
    if !exists()? {
        return Ok(None);
    }
    let max_w = g.max_weight();
    let mut state = ScaleState::initial(k, max_w);
    let mut iterations = Vec::new();
    while state.upper > 2.0 * state.lower {
        let before = state.ratio();
        let (next, record) = refine_step(&state, g, bounded)?;
        state = next;
        iterations.push(record);
        let contracted = state.ratio() <= before.powf(2.0 / 3.0) + 1e-9;
        if !contracted {
            return Err(SolveError::ApproxInconsistent(format!(
                "ratio {} did not contract from {before}",
                state.ratio()
            )));
        }
        if iterations.len() > 64 {
            return Err(SolveError::ApproxInconsistent(
                "scaling loop failed to converge".into(),
            ));
        }
    }
    let k_edges = f64::from(state.k_edges);
    let divisor = eps * state.lower / k_edges;
    let scaled = scale_weights(g, divisor);
    let cap = state.upper / divisor;
    // U <= 2L here, so the final cap is at most 2k'/eps
    debug_assert!(cap <= 2.0 * k_edges / eps * (1.0 + 1e-12) + k_edges);
    let scaled_opt = match bounded(&scaled, cap)? {
        Some(d) => d,
        None => {
            // a k-path exists and OPT <= U always holds, so the final call
            // must find something; a miss is an amplification failure
            return Err(SolveError::ApproxInconsistent(
                "final bounded call found nothing although a path exists".into(),
            ));
        }
    };
    let (vertices, weight) = finish(&scaled, scaled_opt)?;
    // w(P*) <= w_eff(P*) + eps*L <= U + eps*L; anything above signals a
    // broken bracket (a false negative moved L past the optimum)
    if weight > (state.upper + eps * state.lower) * (1.0 + 1e-9) {
        return Err(SolveError::ApproxInconsistent(format!(
            "returned weight {weight} exceeds the certified bound {}",
            state.upper + eps * state.lower
        )));
    }
    Ok(Some(DriverOutcome { vertices, weight, iterations }))
}

fn validate_approx_inputs(g: &WeightedGraph, cfg: &ApproxConfig) -> Result<(), SolveError> {
    if cfg.epsilon <= 0.0 {
        return Err(SolveError::NonPositiveEpsilon { eps: cfg.epsilon });
    }
    if cfg.inner.repetitions < 1 {
        return Err(SolveError::NoRepetitions);
    }
    if g.edge_count() > 0 && g.min_weight() < 1.0 {
        return Err(SolveError::WeightBelowOne { w: g.min_weight() });
    }
    Ok(())
}

/// The (1+eps)-approximate minimum-weight k-path. Always recovers the
/// path on the final scaled graph so the reported weight is the true
/// original weight of a concrete path.
pub fn approx_min_kpath(g: &WeightedGraph, cfg: &ApproxConfig) -> Result<ApproxReport, SolveError> {
    let start = Instant::now();
    validate_approx_inputs(g, cfg)?;
    let k = cfg.k;
    if k == 0 || k > crate::exact::MAX_K {
        return Err(SolveError::KOutOfRange { k, max: crate::exact::MAX_K });
    }
    if k == 1 {
        let found = g.n() >= 1;
        return Ok(ApproxReport {
            weight: found.then_some(0.0),
            vertices: found.then(|| vec![1]),
            iterations: Vec::new(),
            repetitions: cfg.inner.repetitions,
            seed: cfg.seed,
            elapsed: start.elapsed(),
        });
    }

    // An amplification failure inside the loop is detectable (broken
    // bracket or a missing final answer); retry the whole procedure with
    // a fresh seed at most three times.
    let mut last_err = None;
    for attempt in 0..3u64 {
        let seed = cfg.seed.wrapping_add(attempt.wrapping_mul(0xA076_1D64_78BD_642F));
        let mut calls = 0u64;
        let call_cfg = move |calls: u64| ExactConfig {
            seed: seed.wrapping_add(calls.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            ..cfg.inner
        };
        let unweighted = g.map_weights(WeightKind::Integer, |_| 0.0);
        let mut exists = || -> Result<bool, SolveError> {
            let inner = call_cfg(u64::MAX);
            Ok(min_kpath_weight(&unweighted, &inner)?.weight.is_some())
        };
        let mut bounded = |gs: &WeightedGraph, cap: f64| -> Result<Option<i64>, SolveError> {
            calls += 1;
            bounded_min_kpath_weight(gs, cap, &call_cfg(calls)).map(|r| r.weight)
        };
        let mut finish = |gs: &WeightedGraph, d: i64| -> Result<(Vec<u32>, f64), SolveError> {
            let vertices = recover::recover_path_of_weight(gs, k, d, call_cfg(u64::MAX - 1))
                .map_err(|e| SolveError::Oracle(e.to_string()))?;
            let mut true_weight = 0.0;
            for pair in vertices.windows(2) {
                true_weight += g
                    .weight_of(pair[0], pair[1])
                    .ok_or_else(|| SolveError::Oracle("recovered non-edge".into()))?;
            }
            Ok((vertices, true_weight))
        };
        match approx_driver(g, k, cfg.epsilon, &mut exists, &mut bounded, &mut finish) {
            Ok(Some(out)) => {
                return Ok(ApproxReport {
                    weight: Some(out.weight),
                    vertices: Some(out.vertices),
                    iterations: out.iterations,
                    repetitions: cfg.inner.repetitions,
                    seed: cfg.seed,
                    elapsed: start.elapsed(),
                })
            }
            Ok(None) => {
                return Ok(ApproxReport {
                    weight: None,
                    vertices: None,
                    iterations: Vec::new(),
                    repetitions: cfg.inner.repetitions,
                    seed: cfg.seed,
                    elapsed: start.elapsed(),
                })
            }
            Err(e @ SolveError::ApproxInconsistent(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

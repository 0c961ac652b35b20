//! Micro-benchmark harness for the empirical scaling checks: sweeps over
//! k and over the weight bound M on random instances, reporting the
//! median wall time per cell as CSV.

use crate::approx::{approx_min_kpath, ApproxConfig};
use crate::exact::{ExactConfig, WalkEvaluator};
use crate::gen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub n: u32,
    pub ks: Vec<u32>,
    pub ms: Vec<i64>,
    /// Timed runs per cell; the reported value is their median.
    pub runs: u32,
    /// Solver repetitions inside each timed run.
    pub repetitions: u32,
    pub edge_prob: f64,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 30,
            ks: vec![7, 8, 9],
            ms: vec![64, 128, 256],
            runs: 5,
            repetitions: 4,
            edge_prob: 0.5,
            seed: 0xC0FFEE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub k: u32,
    pub n: u32,
    pub m: i64,
    pub mode: String,
    pub elapsed_ms: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2.0
    }
}

/// Time the given (k, M) cells. Runs are interleaved across cells (run 0
/// of every cell, then run 1, ...) so transient machine load hits all
/// cells alike; each cell reports its median.
pub fn bench_cells(cfg: &BenchConfig, cells: &[(u32, i64)]) -> Vec<BenchRow> {
    let instances: Vec<_> = cells
        .iter()
        .map(|&(k, m)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (u64::from(k) << 32) ^ m as u64);
            let g = gen::random_digraph(cfg.n, cfg.edge_prob, 1..=m.max(1), &mut rng);
            (k, m, g)
        })
        .collect();
    let mut times = vec![Vec::with_capacity(cfg.runs as usize); cells.len()];
    for _ in 0..cfg.runs.max(1) {
        for (i, (k, _, g)) in instances.iter().enumerate() {
            let solve_cfg = ExactConfig::new(*k, cfg.repetitions, cfg.seed);
            // repetitions run serially so the measurement reflects per-run
            // cost rather than thread-pool scheduling
            let t0 = Instant::now();
            let ev = WalkEvaluator::prepare(g, &solve_cfg)
                .expect("bench instance must prepare")
                .expect("bench instance admits k-paths");
            let mut best: Option<i64> = None;
            for rep in 0..cfg.repetitions {
                let mut rng = ChaCha8Rng::seed_from_u64(solve_cfg.seed);
                rng.set_stream(u64::from(rep));
                best = match (best, ev.run_once(&mut rng)) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
            }
            std::hint::black_box(&best);
            times[i].push(t0.elapsed().as_secs_f64() * 1e3);
        }
    }
    instances
        .iter()
        .zip(times)
        .map(|((k, m, _), t)| BenchRow {
            k: *k,
            n: cfg.n,
            m: *m,
            mode: "exact".into(),
            elapsed_ms: median(t),
        })
        .collect()
}

/// Approximation timing over an epsilon sweep on one fixed real-weight
/// instance; the final solver call's cap grows like 1/eps, which should
/// show as roughly linear growth in 1/eps.
pub fn bench_eps_cells(cfg: &BenchConfig, k: u32, eps_values: &[f64]) -> Vec<BenchRow> {
    let m = 1_000_000.0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xA99);
    let g = gen::random_real_digraph(cfg.n, cfg.edge_prob, 1.0, m, &mut rng);
    let mut times = vec![Vec::with_capacity(cfg.runs as usize); eps_values.len()];
    for _ in 0..cfg.runs.max(1) {
        for (i, &eps) in eps_values.iter().enumerate() {
            let acfg = ApproxConfig::new(k, eps, cfg.seed, cfg.repetitions);
            let t0 = Instant::now();
            let _ = approx_min_kpath(&g, &acfg).expect("bench instance must solve");
            times[i].push(t0.elapsed().as_secs_f64() * 1e3);
        }
    }
    eps_values
        .iter()
        .zip(times)
        .map(|(&eps, t)| BenchRow {
            k,
            n: cfg.n,
            m: m as i64,
            mode: format!("approx(eps={eps})"),
            elapsed_ms: median(t),
        })
        .collect()
}

/// The full grid: a k-sweep at unit weights (isolating the 2^k factor)
/// followed by an M-sweep at fixed k (isolating the linear M factor).
pub fn run_bench(cfg: &BenchConfig) -> Vec<BenchRow> {
    let k_cells: Vec<(u32, i64)> = cfg.ks.iter().map(|&k| (k, 1)).collect();
    let m_cells: Vec<(u32, i64)> = cfg.ms.iter().map(|&m| (5, m)).collect();
    let mut rows = bench_cells(cfg, &k_cells);
    rows.extend(bench_cells(cfg, &m_cells));
    rows
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("k,n,M,mode,elapsed_ms\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{:.3}\n", r.k, r.n, r.m, r.mode, r.elapsed_ms));
    }
    out
}

/// Geometric mean of the step ratios across a sweep, i.e. the per-step
/// growth factor of the fitted exponential.
pub fn per_step_ratio(times: &[f64]) -> f64 {
    assert!(times.len() >= 2);
    let steps = (times.len() - 1) as f64;
    (times[times.len() - 1] / times[0]).powf(1.0 / steps)
}

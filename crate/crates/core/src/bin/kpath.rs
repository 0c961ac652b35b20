//! Command-line front end: parse a graph (and optionally a tree pattern),
//! dispatch to the requested solver, and print a stable JSON report or a
//! short human-readable summary.
//!
//! Exit codes: 0 = solution found, 1 = no solution, 2 = usage or parse
//! error, 3 = internal failure (recovery or amplification breakdown).

use clap::{Args, Parser, Subcommand};
use kpath::approx::{approx_min_kpath, ApproxConfig, ApproxReport};
use kpath::bench::{bench_csv, run_bench, BenchConfig};
use kpath::exact::{
    bounded_min_kpath_weight, min_kpath_weight, ExactConfig, SolveError, SolveReport,
};
use kpath::io::{
    parse_graph, parse_tree, IterationJson, IterationsJson, ReportJson, WeightJson,
};
use kpath::ktree::{approx_min_ktree, min_ktree_weight, recover_tree_vertices, TreePattern};
use kpath::oracle::{oracle_min_kpath, oracle_min_ktree};
use kpath::recover::{recover_path, RecoverConfig, RecoverError};
use kpath::WeightedGraph;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "kpath",
    about = "Minimum-weight k-path and k-tree solver (randomized algebraic engine)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Graph file (`p <directed|undirected> <n> <m>` then `e <u> <v> <w>`)
    graph: PathBuf,
    /// Number of path vertices / tree nodes
    #[arg(short)]
    k: u32,
    /// RNG seed: a number, or `random` for fresh entropy
    #[arg(long, default_value = "0xC0FFEE")]
    seed: String,
    /// Amplification repetitions (miss probability <= (4/5)^reps)
    #[arg(long, default_value_t = 60)]
    reps: u32,
    /// Also recover the witness (vertex order / embedding)
    #[arg(long)]
    recover: bool,
    /// Emit the JSON report instead of the human summary
    #[arg(long)]
    json: bool,
    /// Include elapsed_ms in the report (off by default so identical
    /// inputs give byte-identical output)
    #[arg(long)]
    timing: bool,
    /// Override the declared weight bound M (defaults to max |w|)
    #[arg(long = "M")]
    m_bound: Option<i64>,
    /// Cap the rayon worker count (1 = sequential; results are identical)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact minimum-weight k-path (integer weights, may be negative)
    Exact(SolveArgs),
    /// Exact among k-paths of weight at most the cap (nonnegative weights)
    Bounded {
        #[command(flatten)]
        common: SolveArgs,
        /// Weight cap B
        #[arg(long)]
        cap: f64,
    },
    /// (1+eps)-approximate minimum-weight k-path (real weights in [1, M])
    Approx {
        #[command(flatten)]
        common: SolveArgs,
        /// Approximation slack eps
        #[arg(long)]
        eps: f64,
    },
    /// Exact minimum-weight copy of a tree pattern
    Tree {
        #[command(flatten)]
        common: SolveArgs,
        /// Tree pattern file (`t <k>` then `e <a> <b>`)
        #[arg(long)]
        tree: PathBuf,
    },
    /// (1+eps)-approximate minimum-weight tree copy
    TreeApprox {
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Brute-force reference solver (k-path, or k-tree with --tree)
    Oracle {
        #[command(flatten)]
        common: SolveArgs,
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Empirical scaling sweeps; prints CSV
    Bench {
        #[arg(long, default_value_t = 30)]
        n: u32,
        /// Comma-separated k values for the 2^k sweep
        #[arg(long, default_value = "7,8,9", value_delimiter = ',')]
        k_list: Vec<u32>,
        /// Comma-separated M values for the linear-M sweep
        #[arg(long, default_value = "64,128,256", value_delimiter = ',')]
        m_list: Vec<i64>,
        /// Timed runs per cell (median reported)
        #[arg(long, default_value_t = 5)]
        runs: u32,
        #[arg(long, default_value_t = 4)]
        reps: u32,
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
        /// Optional epsilon sweep: adds approx-mode rows at k=5
        #[arg(long, value_delimiter = ',')]
        eps_list: Vec<f64>,
        #[arg(long, default_value = "0xC0FFEE")]
        seed: String,
    },
}

fn parse_seed(text: &str) -> Result<u64, String> {
    if text == "random" {
        return Ok(rand::random());
    }
    let parsed = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        text.parse()
    };
    parsed.map_err(|_| format!("invalid seed `{text}`; expected a number or `random`"))
}

enum Outcome {
    Found,
    NoSolution,
    Usage(String),
    Internal(String),
}

fn classify_solve_error(e: &SolveError) -> Outcome {
    match e {
        SolveError::ApproxInconsistent(_) | SolveError::Oracle(_) => Outcome::Internal(e.to_string()),
        _ => Outcome::Usage(e.to_string()),
    }
}

fn classify_recover_error(e: &RecoverError) -> Outcome {
    match e {
        RecoverError::Solve(inner) => classify_solve_error(inner),
        _ => Outcome::Internal(e.to_string()),
    }
}

fn load_graph(path: &PathBuf) -> Result<WeightedGraph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (g, warnings) = parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(g)
}

fn load_tree(path: &PathBuf) -> Result<TreePattern, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_tree(&text).map_err(|e| format!("{}: {e}", path.display()))
}

struct Rendered {
    report: ReportJson,
    outcome: Outcome,
}

fn render_exact(
    report: &SolveReport,
    k: u32,
    mode: &'static str,
    is_tree: bool,
    elapsed_ms: Option<f64>,
) -> Rendered {
    let witness = report.vertices.clone();
    let json = ReportJson {
        weight: report.weight.map(WeightJson::Int),
        path: (!is_tree).then_some(witness.clone()),
        embedding: is_tree.then_some(witness),
        k,
        seed: report.seed,
        repetitions: report.repetitions_used,
        mode,
        elapsed_ms,
        iterations: None,
    };
    let outcome = if report.weight.is_some() { Outcome::Found } else { Outcome::NoSolution };
    Rendered { report: json, outcome }
}

fn render_approx(
    report: &ApproxReport,
    k: u32,
    mode: &'static str,
    is_tree: bool,
    recovered: bool,
    elapsed_ms: Option<f64>,
) -> Rendered {
    let witness = recovered.then(|| report.vertices.clone()).flatten();
    let json = ReportJson {
        weight: report.weight.map(WeightJson::Real),
        path: (!is_tree).then_some(witness.clone()),
        embedding: is_tree.then_some(witness),
        k,
        seed: report.seed,
        repetitions: report.repetitions,
        mode,
        elapsed_ms,
        iterations: Some(IterationsJson {
            count: report.iterations.len() as u32,
            trace: report
                .iterations
                .iter()
                .map(|it| IterationJson { lower: it.lower, upper: it.upper })
                .collect(),
        }),
    };
    let outcome = if report.weight.is_some() { Outcome::Found } else { Outcome::NoSolution };
    Rendered { report: json, outcome }
}

fn emit(rendered: &Rendered, json: bool) {
    if json {
        println!("{}", rendered.report.to_json());
        return;
    }
    let r = &rendered.report;
    match &r.weight {
        Some(WeightJson::Int(w)) => println!("weight: {w}"),
        Some(WeightJson::Real(w)) => println!("weight: {w}"),
        None => println!("weight: none (no solution)"),
    }
    let witness = r.path.as_ref().or(r.embedding.as_ref());
    if let Some(Some(vs)) = witness {
        let label = if r.path.is_some() { "path" } else { "embedding" };
        let rendered: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        println!("{label}: {}", rendered.join(" "));
    }
    if let Some(it) = &r.iterations {
        println!("iterations: {}", it.count);
    }
    if let Some(ms) = r.elapsed_ms {
        println!("elapsed_ms: {ms:.3}");
    }
}

fn run_solve(cmd: &Command) -> Result<Rendered, Outcome> {
    let common = match cmd {
        Command::Exact(c)
        | Command::Bounded { common: c, .. }
        | Command::Approx { common: c, .. }
        | Command::Tree { common: c, .. }
        | Command::TreeApprox { common: c, .. }
        | Command::Oracle { common: c, .. } => c.clone(),
        Command::Bench { .. } => unreachable!("bench handled separately"),
    };
    let seed = parse_seed(&common.seed).map_err(Outcome::Usage)?;
    let g = load_graph(&common.graph).map_err(Outcome::Usage)?;
    let mut inner = ExactConfig::new(common.k, common.reps, seed);
    inner.declared_m = common.m_bound;
    let t0 = Instant::now();

    let run = || -> Result<Rendered, Outcome> {
        match cmd {
            Command::Exact(_) => {
                let report = if common.recover {
                    recover_path(&g, &RecoverConfig::new(inner))
                        .map_err(|e| classify_recover_error(&e))?
                } else {
                    min_kpath_weight(&g, &inner).map_err(|e| classify_solve_error(&e))?
                };
                let ms = common.timing.then(|| t0.elapsed().as_secs_f64() * 1e3);
                Ok(render_exact(&report, common.k, "exact", false, ms))
            }
            Command::Bounded { cap, .. } => {
                let report = bounded_min_kpath_weight(&g, *cap, &inner)
                    .map_err(|e| classify_solve_error(&e))?;
                let ms = common.timing.then(|| t0.elapsed().as_secs_f64() * 1e3);
                Ok(render_exact(&report, common.k, "bounded", false, ms))
            }
            Command::Approx { eps, .. } => {
                let cfg = ApproxConfig { k: common.k, epsilon: *eps, seed, inner };
                let report = approx_min_kpath(&g, &cfg).map_err(|e| classify_solve_error(&e))?;
                let ms = common.timing.then(|| t0.elapsed().as_secs_f64() * 1e3);
                Ok(render_approx(&report, common.k, "approx", false, common.recover, ms))
            }
            Command::Tree { tree, .. } => {
                let pattern = load_tree(tree).map_err(Outcome::Usage)?;
                if pattern.k() != common.k {
                    return Err(Outcome::Usage(format!(
                        "-k {} disagrees with the {}-node tree file",
                        common.k,
                        pattern.k()
                    )));
                }
                let report = if common.recover {
                    recover_tree_vertices(&g, &pattern, &RecoverConfig::new(inner))
                        .map_err(|e| classify_recover_error(&e))?
                } else {
                    min_ktree_weight(&g, &pattern, &inner).map_err(|e| classify_solve_error(&e))?
                };
                let ms = common.timing.then(|| t0.elapsed().as_secs_f64() * 1e3);
                Ok(render_exact(&report, common.k, "tree", true, ms))
            }
            Command::TreeApprox { tree, eps, .. } => {
                let pattern = load_tree(tree).map_err(Outcome::Usage)?;
                if pattern.k() != common.k {
                    return Err(Outcome::Usage(format!(
                        "-k {} disagrees with the {}-node tree file",
                        common.k,
                        pattern.k()
                    )));
                }
                let cfg = ApproxConfig { k: common.k, epsilon: *eps, seed, inner };
                let report =
                    approx_min_ktree(&g, &pattern, &cfg).map_err(|e| classify_solve_error(&e))?;
                let ms = common.timing.then(|| t0.elapsed().as_secs_f64() * 1e3);
                Ok(render_approx(&report, common.k, "tree-approx", true, common.recover, ms))
            }
            Command::Oracle { tree, .. } => {
                let (weight, witness, is_tree) = match tree {
                    Some(tree_path) => {
                        let pattern = load_tree(tree_path).map_err(Outcome::Usage)?;
                        if pattern.k() != common.k {
                            return Err(Outcome::Usage(format!(
                                "-k {} disagrees with the {}-node tree file",
                                common.k,
                                pattern.k()
                            )));
                        }
                        match oracle_min_ktree(&g, &pattern) {
                            Ok(Some((w, emb))) => (Some(w), Some(emb), true),
                            Ok(None) => (None, None, true),
                            Err(e) => return Err(Outcome::Usage(e.to_string())),
                        }
                    }
                    None => match oracle_min_kpath(&g, common.k) {
                        Ok(Some((w, path))) => (Some(w), Some(path), false),
                        Ok(None) => (None, None, false),
                        Err(e) => return Err(Outcome::Usage(e.to_string())),
                    },
                };
                let ms = common.timing.then(|| t0.elapsed().as_secs_f64() * 1e3);
                let json = ReportJson {
                    weight: weight.map(WeightJson::Int),
                    path: (!is_tree).then_some(witness.clone()),
                    embedding: is_tree.then_some(witness),
                    k: common.k,
                    seed,
                    repetitions: 0,
                    mode: "oracle",
                    elapsed_ms: ms,
                    iterations: None,
                };
                let outcome =
                    if weight.is_some() { Outcome::Found } else { Outcome::NoSolution };
                Ok(Rendered { report: json, outcome })
            }
            Command::Bench { .. } => unreachable!(),
        }
    };

    match common.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Outcome::Internal(e.to_string()))?;
            pool.install(run)
        }
        None => run(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Command::Bench { n, k_list, m_list, runs, reps, edge_prob, eps_list, seed } = &cli.command {
        let seed = match parse_seed(seed) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        let cfg = BenchConfig {
            n: *n,
            ks: k_list.clone(),
            ms: m_list.clone(),
            runs: *runs,
            repetitions: *reps,
            edge_prob: *edge_prob,
            seed,
        };
        let mut rows = run_bench(&cfg);
        if !eps_list.is_empty() {
            rows.extend(kpath::bench::bench_eps_cells(&cfg, 5, eps_list));
        }
        print!("{}", bench_csv(&rows));
        return ExitCode::SUCCESS;
    }

    let json = match &cli.command {
        Command::Exact(c)
        | Command::Bounded { common: c, .. }
        | Command::Approx { common: c, .. }
        | Command::Tree { common: c, .. }
        | Command::TreeApprox { common: c, .. }
        | Command::Oracle { common: c, .. } => c.json,
        Command::Bench { .. } => unreachable!(),
    };

    match run_solve(&cli.command) {
        Ok(rendered) => {
            emit(&rendered, json);
            match rendered.outcome {
                Outcome::Found => ExitCode::SUCCESS,
                Outcome::NoSolution => ExitCode::from(1),
                Outcome::Usage(_) | Outcome::Internal(_) => unreachable!(),
            }
        }
        Err(Outcome::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Outcome::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Outcome::Found | Outcome::NoSolution) => unreachable!(),
    }
}

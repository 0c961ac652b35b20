//! End-to-end checks of the command-line surface: exit codes, the JSON
//! report schema, determinism, and the bench CSV.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_kpath")
}

fn write(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn exact_finds_the_path_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "path3.graph", "p directed 3 2\ne 1 2 5\ne 2 3 7\n");
    let out = run(&["exact", "-k", "3", "--seed", "7", "--reps", "60", "--json",
        graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["weight"], 12);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["k"], 3);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["repetitions"], 60);
    assert!(v["path"].is_null());
    assert!(v.get("elapsed_ms").is_none(), "timing only with --timing");
}

#[test]
fn k_above_n_exits_one_with_null_weight() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "tri.graph", "p directed 3 3\ne 1 2 1\ne 2 3 2\ne 3 1 4\n");
    let out = run(&["exact", "-k", "5", "--seed", "7", "--json", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["weight"].is_null());
}

#[test]
fn parse_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "bad.graph", "e 1 2 5\n");
    let out = run(&["exact", "-k", "2", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing header"));
}

#[test]
fn recover_emits_the_vertex_order() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "path4.graph", "p directed 4 3\ne 1 2 2\ne 2 3 3\ne 3 4 4\n");
    let out = run(&["exact", "-k", "4", "--recover", "--json", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["weight"], 9);
    assert_eq!(v["path"], serde_json::json!([1, 2, 3, 4]));
}

#[test]
fn bounded_respects_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "p3.graph", "p directed 3 2\ne 1 2 1\ne 2 3 1\n");
    let below = run(&["bounded", "-k", "3", "--cap", "1", "--json", graph.to_str().unwrap()]);
    assert_eq!(below.status.code(), Some(1));
    let at = run(&["bounded", "-k", "3", "--cap", "2", "--json", graph.to_str().unwrap()]);
    assert_eq!(at.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&at).trim()).unwrap();
    assert_eq!(v["weight"], 2);
    assert_eq!(v["mode"], "bounded");
}

#[test]
fn approx_stays_within_eps_of_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(
        &dir,
        "real.graph",
        "p directed 5 6\ne 1 2 1.5\ne 2 3 2500.25\ne 3 4 10.0\ne 1 3 99999.5\ne 2 4 3000.0\ne 4 5 1.25\n",
    );
    let approx = run(&["approx", "-k", "4", "--eps", "0.1", "--seed", "7", "--json",
        graph.to_str().unwrap()]);
    assert_eq!(approx.status.code(), Some(0));
    let got: serde_json::Value = serde_json::from_str(stdout(&approx).trim()).unwrap();
    let approx_w = got["weight"].as_f64().unwrap();
    // by hand: 2->3->4->5 = 2511.5; 1->2->3->4 = 2511.75; others heavier
    let opt = 2500.25 + 10.0 + 1.25;
    assert!(approx_w <= 1.1 * opt && approx_w >= opt - 1e-9);
    assert!(got["iterations"]["count"].as_u64().unwrap() <= 10);
}

#[test]
fn tree_mode_matches_oracle_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "tri.graph", "p undirected 3 3\ne 1 2 1\ne 2 3 2\ne 1 3 4\n");
    let tree = write(&dir, "star.tree", "t 3\ne 1 2\ne 1 3\n");
    let solved = run(&["tree", "-k", "3", "--tree", tree.to_str().unwrap(), "--recover",
        "--json", graph.to_str().unwrap()]);
    assert_eq!(solved.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&solved).trim()).unwrap();
    assert_eq!(v["weight"], 3);
    assert_eq!(v["mode"], "tree");
    let emb = v["embedding"].as_array().unwrap();
    assert_eq!(emb.len(), 3);
    assert_eq!(emb[0], 2); // the centre maps to the shared vertex

    let oracle = run(&["oracle", "-k", "3", "--tree", tree.to_str().unwrap(), "--json",
        graph.to_str().unwrap()]);
    assert_eq!(oracle.status.code(), Some(0));
    let ov: serde_json::Value = serde_json::from_str(stdout(&oracle).trim()).unwrap();
    assert_eq!(ov["weight"], 3);
    assert_eq!(ov["mode"], "oracle");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(
        &dir,
        "g.graph",
        "p directed 6 7\ne 1 2 3\ne 2 3 -1\ne 3 4 5\ne 4 5 2\ne 1 3 4\ne 2 4 6\ne 5 6 1\n",
    );
    let args = ["exact", "-k", "4", "--seed", "99", "--reps", "40", "--recover", "--json",
        graph.to_str().unwrap()];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(
        &dir,
        "g.graph",
        "p directed 6 7\ne 1 2 3\ne 2 3 -1\ne 3 4 5\ne 4 5 2\ne 1 3 4\ne 2 4 6\ne 5 6 1\n",
    );
    let base = ["exact", "-k", "4", "--seed", "5", "--reps", "40", "--json"];
    let one = run(&[&base[..], &["--threads", "1", graph.to_str().unwrap()]].concat());
    let four = run(&[&base[..], &["--threads", "4", graph.to_str().unwrap()]].concat());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn duplicate_edges_warn_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "dup.graph", "p directed 2 2\ne 1 2 5\ne 1 2 9\n");
    let out = run(&["exact", "-k", "2", "--json", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["weight"], 5); // first edge wins
}

#[test]
fn bench_emits_the_csv_grid() {
    let out = run(&["bench", "--n", "10", "--k-list", "3,4", "--m-list", "4",
        "--runs", "3", "--reps", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,n,M,mode,elapsed_ms"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3); // two k cells + one M cell
    for row in rows {
        assert_eq!(row.split(',').count(), 5);
        assert!(row.contains("exact"));
    }
}

#[test]
fn timing_flag_adds_elapsed() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "p3.graph", "p directed 3 2\ne 1 2 5\ne 2 3 7\n");
    let out = run(&["exact", "-k", "3", "--timing", "--json", graph.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["elapsed_ms"].as_f64().unwrap() >= 0.0);
}

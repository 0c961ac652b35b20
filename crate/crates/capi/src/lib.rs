//! C ABI for the kpath solver: opaque handles for graphs, tree patterns,
//! and solve reports, plus status codes matching the CLI exit codes.
//!
//! Conventions: constructors return NULL on failure and record a status
//! code and message retrievable with `kp_last_status` / `kp_last_error`
//! (both thread-local). Every handle has a matching `_free`; strings
//! returned by `kp_report_to_json` are released with `kp_string_free`.
//! Panics never cross the boundary; they surface as `KP_STATUS_INTERNAL`.

use kpath::approx::{approx_min_kpath, ApproxConfig, ApproxReport};
use kpath::exact::{bounded_min_kpath_weight, min_kpath_weight, ExactConfig, SolveReport};
use kpath::io::{parse_graph, parse_tree, IterationJson, IterationsJson, ReportJson, WeightJson};
use kpath::ktree::{approx_min_ktree, min_ktree_weight, recover_tree_vertices, TreePattern};
use kpath::recover::{recover_path, RecoverConfig};
use kpath::WeightedGraph;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Outcome of the most recent call on this thread.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum KpStatus {
    Ok = 0,
    NoSolution = 1,
    Invalid = 2,
    Internal = 3,
}

pub struct KpGraph {
    inner: WeightedGraph,
}

pub struct KpTree {
    inner: TreePattern,
}

pub struct KpReport {
    weight: Option<f64>,
    vertices: Option<Vec<u32>>,
    json: ReportJson,
}

thread_local! {
    static LAST: RefCell<(KpStatus, CString)> =
        RefCell::new((KpStatus::Ok, CString::new("ok").unwrap()));
}

fn set_last(status: KpStatus, message: &str) {
    let msg = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST.with(|l| *l.borrow_mut() = (status, msg));
}

/// Status of the most recent call on this thread.
#[no_mangle]
pub extern "C" fn kp_last_status() -> KpStatus {
    LAST.with(|l| l.borrow().0)
}

/// Message for the most recent failure on this thread; the pointer stays
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn kp_last_error() -> *const c_char {
    LAST.with(|l| l.borrow().1.as_ptr())
}

fn guarded<T>(f: impl FnOnce() -> *mut T) -> *mut T {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(p) => p,
        Err(_) => {
            set_last(KpStatus::Internal, "internal panic");
            ptr::null_mut()
        }
    }
}

unsafe fn read_utf8<'a>(text: *const c_char) -> Result<&'a str, ()> {
    if text.is_null() {
        set_last(KpStatus::Invalid, "null text pointer");
        return Err(());
    }
    match CStr::from_ptr(text).to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_last(KpStatus::Invalid, "text is not valid UTF-8");
            Err(())
        }
    }
}

/// Parse the graph grammar (`p <directed|undirected> <n> <m>` header,
/// then `e <u> <v> <w>` lines). NULL on parse failure.
///
/// # Safety
/// `text` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn kp_graph_parse(text: *const c_char) -> *mut KpGraph {
    guarded(|| {
        let Ok(s) = read_utf8(text) else { return ptr::null_mut() };
        match parse_graph(s) {
            Ok((inner, _warnings)) => {
                set_last(KpStatus::Ok, "ok");
                Box::into_raw(Box::new(KpGraph { inner }))
            }
            Err(e) => {
                set_last(KpStatus::Invalid, &e.to_string());
                ptr::null_mut()
            }
        }
    })
}

/// # Safety
/// `g` must come from `kp_graph_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kp_graph_free(g: *mut KpGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle (or NULL, which yields 0).
#[no_mangle]
pub unsafe extern "C" fn kp_graph_vertex_count(g: *const KpGraph) -> u32 {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `g` must be a live graph handle (or NULL, which yields 0).
#[no_mangle]
pub unsafe extern "C" fn kp_graph_edge_count(g: *const KpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// Parse the tree grammar (`t <k>` header, then `e <a> <b>` lines).
///
/// # Safety
/// `text` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn kp_tree_parse(text: *const c_char) -> *mut KpTree {
    guarded(|| {
        let Ok(s) = read_utf8(text) else { return ptr::null_mut() };
        match parse_tree(s) {
            Ok(inner) => {
                set_last(KpStatus::Ok, "ok");
                Box::into_raw(Box::new(KpTree { inner }))
            }
            Err(e) => {
                set_last(KpStatus::Invalid, &e.to_string());
                ptr::null_mut()
            }
        }
    })
}

/// # Safety
/// `t` must come from `kp_tree_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kp_tree_free(t: *mut KpTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live tree handle (or NULL, which yields 0).
#[no_mangle]
pub unsafe extern "C" fn kp_tree_node_count(t: *const KpTree) -> u32 {
    t.as_ref().map_or(0, |t| t.inner.k())
}

fn report_from_exact(
    report: SolveReport,
    k: u32,
    mode: &'static str,
    is_tree: bool,
) -> *mut KpReport {
    let status = if report.weight.is_some() { KpStatus::Ok } else { KpStatus::NoSolution };
    set_last(status, if status == KpStatus::Ok { "ok" } else { "no solution" });
    let witness = report.vertices.clone();
    let json = ReportJson {
        weight: report.weight.map(WeightJson::Int),
        path: (!is_tree).then_some(witness.clone()),
        embedding: is_tree.then_some(witness),
        k,
        seed: report.seed,
        repetitions: report.repetitions_used,
        mode,
        elapsed_ms: None,
        iterations: None,
    };
    Box::into_raw(Box::new(KpReport {
        weight: report.weight.map(|w| w as f64),
        vertices: report.vertices,
        json,
    }))
}

fn report_from_approx(
    report: ApproxReport,
    k: u32,
    mode: &'static str,
    is_tree: bool,
) -> *mut KpReport {
    let status = if report.weight.is_some() { KpStatus::Ok } else { KpStatus::NoSolution };
    set_last(status, if status == KpStatus::Ok { "ok" } else { "no solution" });
    let witness = report.vertices.clone();
    let json = ReportJson {
        weight: report.weight.map(WeightJson::Real),
        path: (!is_tree).then_some(witness.clone()),
        embedding: is_tree.then_some(witness),
        k,
        seed: report.seed,
        repetitions: report.repetitions,
        mode,
        elapsed_ms: None,
        iterations: Some(IterationsJson {
            count: report.iterations.len() as u32,
            trace: report
                .iterations
                .iter()
                .map(|it| IterationJson { lower: it.lower, upper: it.upper })
                .collect(),
        }),
    };
    Box::into_raw(Box::new(KpReport { weight: report.weight, vertices: report.vertices, json }))
}

fn fail<T>(status: KpStatus, message: &str) -> *mut T {
    set_last(status, message);
    ptr::null_mut()
}

fn solve_status(e: &kpath::SolveError) -> KpStatus {
    match e {
        kpath::SolveError::ApproxInconsistent(_) | kpath::SolveError::Oracle(_) => {
            KpStatus::Internal
        }
        _ => KpStatus::Invalid,
    }
}

/// Exact minimum-weight k-path; integer weights, negatives allowed.
/// `recover` also reconstructs the vertex order.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn kp_solve_exact(
    g: *const KpGraph,
    k: u32,
    seed: u64,
    repetitions: u32,
    recover: bool,
) -> *mut KpReport {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return fail(KpStatus::Invalid, "null graph handle");
        };
        let cfg = ExactConfig::new(k, repetitions, seed);
        let solved = if recover {
            recover_path(&g.inner, &RecoverConfig::new(cfg))
                .map_err(|e| (KpStatus::Internal, e.to_string()))
        } else {
            min_kpath_weight(&g.inner, &cfg).map_err(|e| (solve_status(&e), e.to_string()))
        };
        match solved {
            Ok(report) => report_from_exact(report, k, "exact", false),
            Err((status, msg)) => fail(status, &msg),
        }
    })
}

/// Exact among k-paths of weight at most `cap`; nonnegative weights.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn kp_solve_bounded(
    g: *const KpGraph,
    k: u32,
    cap: f64,
    seed: u64,
    repetitions: u32,
) -> *mut KpReport {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return fail(KpStatus::Invalid, "null graph handle");
        };
        let cfg = ExactConfig::new(k, repetitions, seed);
        match bounded_min_kpath_weight(&g.inner, cap, &cfg) {
            Ok(report) => report_from_exact(report, k, "bounded", false),
            Err(e) => fail(solve_status(&e), &e.to_string()),
        }
    })
}

/// (1+epsilon)-approximate minimum-weight k-path for real weights in
/// [1, M]; the report always carries the recovered path.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn kp_solve_approx(
    g: *const KpGraph,
    k: u32,
    epsilon: f64,
    seed: u64,
    repetitions: u32,
) -> *mut KpReport {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return fail(KpStatus::Invalid, "null graph handle");
        };
        let cfg = ApproxConfig::new(k, epsilon, seed, repetitions);
        match approx_min_kpath(&g.inner, &cfg) {
            Ok(report) => report_from_approx(report, k, "approx", false),
            Err(e) => fail(solve_status(&e), &e.to_string()),
        }
    })
}

/// Exact minimum-weight copy of the tree pattern.
///
/// # Safety
/// `g` and `t` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn kp_solve_tree(
    g: *const KpGraph,
    t: *const KpTree,
    seed: u64,
    repetitions: u32,
    recover: bool,
) -> *mut KpReport {
    guarded(|| {
        let (Some(g), Some(t)) = (g.as_ref(), t.as_ref()) else {
            return fail(KpStatus::Invalid, "null handle");
        };
        let k = t.inner.k();
        let cfg = ExactConfig::new(k, repetitions, seed);
        let solved = if recover {
            recover_tree_vertices(&g.inner, &t.inner, &RecoverConfig::new(cfg))
                .map_err(|e| (KpStatus::Internal, e.to_string()))
        } else {
            min_ktree_weight(&g.inner, &t.inner, &cfg)
                .map_err(|e| (solve_status(&e), e.to_string()))
        };
        match solved {
            Ok(report) => report_from_exact(report, k, "tree", true),
            Err((status, msg)) => fail(status, &msg),
        }
    })
}

/// (1+epsilon)-approximate minimum-weight tree copy.
///
/// # Safety
/// `g` and `t` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn kp_solve_tree_approx(
    g: *const KpGraph,
    t: *const KpTree,
    epsilon: f64,
    seed: u64,
    repetitions: u32,
) -> *mut KpReport {
    guarded(|| {
        let (Some(g), Some(t)) = (g.as_ref(), t.as_ref()) else {
            return fail(KpStatus::Invalid, "null handle");
        };
        let k = t.inner.k();
        let cfg = ApproxConfig::new(k, epsilon, seed, repetitions);
        match approx_min_ktree(&g.inner, &t.inner, &cfg) {
            Ok(report) => report_from_approx(report, k, "tree-approx", true),
            Err(e) => fail(solve_status(&e), &e.to_string()),
        }
    })
}

/// # Safety
/// `r` must be a live report handle (or NULL).
#[no_mangle]
pub unsafe extern "C" fn kp_report_has_weight(r: *const KpReport) -> bool {
    r.as_ref().is_some_and(|r| r.weight.is_some())
}

/// The found weight; exact modes return an integral value. 0 when absent
/// (check `kp_report_has_weight`).
///
/// # Safety
/// `r` must be a live report handle (or NULL).
#[no_mangle]
pub unsafe extern "C" fn kp_report_weight(r: *const KpReport) -> f64 {
    r.as_ref().and_then(|r| r.weight).unwrap_or(0.0)
}

/// Number of witness vertices (path order or embedding), 0 when the
/// witness was not recovered.
///
/// # Safety
/// `r` must be a live report handle (or NULL).
#[no_mangle]
pub unsafe extern "C" fn kp_report_vertex_count(r: *const KpReport) -> usize {
    r.as_ref().map_or(0, |r| r.vertices.as_ref().map_or(0, Vec::len))
}

/// Copy up to `cap` witness vertices into `buf`; returns the number
/// copied. For path modes this is the vertex order; for tree modes entry
/// i is the image of tree node i+1.
///
/// # Safety
/// `buf` must point to at least `cap` writable u32 slots.
#[no_mangle]
pub unsafe extern "C" fn kp_report_vertices(
    r: *const KpReport,
    buf: *mut u32,
    cap: usize,
) -> usize {
    let Some(r) = r.as_ref() else { return 0 };
    let Some(vs) = r.vertices.as_ref() else { return 0 };
    if buf.is_null() {
        return 0;
    }
    let count = vs.len().min(cap);
    ptr::copy_nonoverlapping(vs.as_ptr(), buf, count);
    count
}

/// The JSON report (same schema as the CLI). Free with `kp_string_free`.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn kp_report_to_json(r: *const KpReport) -> *mut c_char {
    let Some(r) = r.as_ref() else {
        set_last(KpStatus::Invalid, "null report handle");
        return ptr::null_mut();
    };
    CString::new(r.json.to_json()).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must come from `kp_report_to_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `r` must come from a solve call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn kp_report_free(r: *mut KpReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn parse_solve_and_recover_through_the_abi() {
        unsafe {
            let text = cstr("p directed 3 2\ne 1 2 5\ne 2 3 7\n");
            let g = kp_graph_parse(text.as_ptr());
            assert!(!g.is_null());
            assert_eq!(kp_last_status() as i32, 0);
            assert_eq!(kp_graph_vertex_count(g), 3);
            assert_eq!(kp_graph_edge_count(g), 2);

            let r = kp_solve_exact(g, 3, 7, 60, true);
            assert!(!r.is_null());
            assert_eq!(kp_last_status() as i32, 0);
            assert!(kp_report_has_weight(r));
            assert_eq!(kp_report_weight(r), 12.0);
            assert_eq!(kp_report_vertex_count(r), 3);
            let mut buf = [0u32; 8];
            assert_eq!(kp_report_vertices(r, buf.as_mut_ptr(), 8), 3);
            assert_eq!(&buf[..3], &[1, 2, 3]);

            let json = kp_report_to_json(r);
            let json_str = CStr::from_ptr(json).to_str().unwrap().to_owned();
            assert!(json_str.contains("\"weight\":12"));
            assert!(json_str.contains("\"mode\":\"exact\""));
            kp_string_free(json);

            kp_report_free(r);
            kp_graph_free(g);
        }
    }

    #[test]
    fn no_solution_sets_status_one() {
        unsafe {
            let text = cstr("p directed 3 2\ne 1 2 5\ne 2 3 7\n");
            let g = kp_graph_parse(text.as_ptr());
            let r = kp_solve_exact(g, 5, 7, 10, false);
            assert!(!r.is_null());
            assert_eq!(kp_last_status() as i32, 1);
            assert!(!kp_report_has_weight(r));
            kp_report_free(r);
            kp_graph_free(g);
        }
    }

    #[test]
    fn parse_failure_yields_null_and_message() {
        unsafe {
            let text = cstr("e 1 2 5\n");
            let g = kp_graph_parse(text.as_ptr());
            assert!(g.is_null());
            assert_eq!(kp_last_status() as i32, 2);
            let msg = CStr::from_ptr(kp_last_error()).to_str().unwrap();
            assert!(msg.contains("missing header"), "{msg}");
        }
    }

    #[test]
    fn approx_reports_iterations_in_json() {
        unsafe {
            let text = cstr("p directed 4 3\ne 1 2 1.5\ne 2 3 100000.25\ne 3 4 2.0\n");
            let g = kp_graph_parse(text.as_ptr());
            let r = kp_solve_approx(g, 4, 0.1, 9, 60);
            assert!(!r.is_null());
            assert_eq!(kp_report_weight(r), 1.5 + 100000.25 + 2.0);
            let json = kp_report_to_json(r);
            let json_str = CStr::from_ptr(json).to_str().unwrap().to_owned();
            assert!(json_str.contains("\"iterations\""));
            kp_string_free(json);
            kp_report_free(r);
            kp_graph_free(g);
        }
    }

    #[test]
    fn tree_solving_through_the_abi() {
        unsafe {
            let gtext = cstr("p undirected 3 3\ne 1 2 1\ne 2 3 2\ne 1 3 4\n");
            let ttext = cstr("t 3\ne 1 2\ne 1 3\n");
            let g = kp_graph_parse(gtext.as_ptr());
            let t = kp_tree_parse(ttext.as_ptr());
            assert!(!t.is_null());
            assert_eq!(kp_tree_node_count(t), 3);
            let r = kp_solve_tree(g, t, 11, 60, true);
            assert_eq!(kp_report_weight(r), 3.0);
            let mut buf = [0u32; 3];
            assert_eq!(kp_report_vertices(r, buf.as_mut_ptr(), 3), 3);
            assert_eq!(buf[0], 2); // the star centre
            kp_report_free(r);
            kp_tree_free(t);
            kp_graph_free(g);
        }
    }

    #[test]
    fn malformed_tree_is_rejected() {
        unsafe {
            let ttext = cstr("t 3\ne 1 2\ne 2 3\ne 3 1\n");
            let t = kp_tree_parse(ttext.as_ptr());
            assert!(t.is_null());
            assert_eq!(kp_last_status() as i32, 2);
        }
    }

    #[test]
    fn generated_header_exposes_the_surface() {
        let header = std::fs::read_to_string(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kpath.h"),
        )
        .expect("build.rs generates include/kpath.h");
        for symbol in [
            "kp_graph_parse",
            "kp_solve_exact",
            "kp_solve_bounded",
            "kp_solve_approx",
            "kp_solve_tree",
            "kp_solve_tree_approx",
            "kp_report_weight",
            "kp_report_vertices",
            "kp_report_to_json",
            "KP_STATUS_NO_SOLUTION",
        ] {
            assert!(header.contains(symbol), "header lacks {symbol}");
        }
    }
}

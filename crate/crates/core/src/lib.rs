//! Randomized algebraic solvers for minimum-weight k-path and k-tree.
//!
//! The core engine evaluates a walk-generating polynomial over the group
//! algebra GF(2^ell)[Z_2^k], extended by a degree variable that tracks
//! accumulated path weight. Non-simple walks cancel deterministically in
//! characteristic 2; the minimum surviving degree is the optimum weight
//! with constant probability per run, amplified by repetition. On top of
//! the exact engine sit actual-path recovery, a (1+eps) approximation via
//! adaptive weight scaling, tree-pattern matching, brute-force reference
//! oracles, and file/CLI plumbing.

pub mod approx;
pub mod bench;
pub mod exact;
pub mod gen;
pub mod gf2e;
pub mod graph;
pub mod io;
pub mod ktree;
pub mod oracle;
pub mod recover;
pub mod ring;

pub use approx::{approx_min_kpath, ApproxConfig, ApproxReport};
pub use exact::{
    bounded_min_kpath_weight, min_kpath_weight, min_kpath_weight_once, ExactConfig, SolveError,
    SolveReport,
};
pub use gf2e::{FieldElement, FieldParams};
pub use graph::{WeightKind, WeightedGraph};
pub use ktree::{approx_min_ktree, min_ktree_weight, recover_tree_vertices, TreePattern};
pub use oracle::{oracle_kpath_weights, oracle_min_kpath, oracle_min_ktree};
pub use recover::{recover_path, RecoverConfig, RecoverError};
pub use ring::{GroupVector, RingElement, RingParams};

//! Longest-common-subsequence (LCS) graph kernel.
//!
//! A graph is represented by the serialized label sequences of its shortest
//! paths. Two graphs are compared by the optimal-transport cost between their
//! sequence distributions, where the ground distance between two sequences is
//! `1 - lcs / max_len`. The kernel value is `exp(-lambda * distance)`.
//!
//! Pipeline:
//!
//! 1. [`tudataset::load_tudataset`] reads a benchmark dataset.
//! 2. [`paths::all_pairs_shortest_paths`] enumerates one geodesic per ordered
//!    vertex pair and [`serialize::serialize_path`] turns each into a
//!    [`serialize::PathSequence`].
//! 3. [`representation::build_basic`] (BLCS) or [`representation::build_fast`]
//!    (FLCS) aggregates sequences into a [`representation::PathMeasure`].
//! 4. [`kernel::gram_matrix`] evaluates all graph pairs with the solvers in
//!    [`ot`].
//! 5. [`eval`] runs a one-vs-one kernel SVM under repeated stratified
//!    cross-validation.

pub mod eval;
pub mod graph;
pub mod kernel;
pub mod lcs;
pub mod ot;
pub mod paths;
pub mod representation;
pub mod serialize;
pub mod tudataset;

pub use graph::{Dataset, Graph, GraphError};
pub use kernel::{GramMatrix, KernelParams, Variant};
pub use representation::{FlcsParams, PathMeasure};
pub use serialize::PathSequence;

//! Kempe swap k-means.
//!
//! Minimum-inertia clustering under hard must-link / cannot-link constraints.
//! Must-linked points are collapsed into weighted super-nodes, cannot-link
//! pairs become edges of a super-node graph, and a clustering is a proper
//! k-coloring of that graph. Assignments are improved with Kempe chain
//! swaps, which never break a proper coloring, and centroids are mutated
//! (perturbed or relocated) to escape local optima.
//!
//! Module map:
//! - [`constraints`]: constraint sets, must-link closure, super-node graph
//! - [`coloring`]: DSATUR coloring and nearest-centroid DSATUR assignment
//! - [`kempe`]: Kempe chains, swap costs, swap conflicts, 3-chain rotations
//! - [`mwis`]: selection of compatible swaps (exact and spectral heuristic)
//! - [`gcp`]: fixed-centroid exact assignment by branch-and-bound
//! - [`solver`]: KSKM, KSKM with exact escapes, COP-k-means baselines
//! - [`bench`]: data loading, constraint generation, metrics, experiments

pub mod bench;
pub mod coloring;
pub mod constraints;
pub mod data;
pub mod error;
pub mod gcp;
pub mod hungarian;
pub mod kempe;
pub mod kmeans;
pub mod model;
pub mod mwis;
pub mod solver;

pub use constraints::{ConstraintSet, SuperNodeGraph};
pub use data::Dataset;
pub use error::{Error, Result};
pub use model::{Assignment, Centroids, Problem};
pub use solver::{Mode, RelocationStrategy, Solution, SolverConfig};

//! Data ingestion, constraint generation, metrics and experiment reports.

pub mod experiment;
pub mod generate;
pub mod io;
pub mod metrics;

pub use experiment::{run_experiment, CellSummary, ExperimentReport, ExperimentSpec, RunRecord};
pub use generate::{gaussian_blobs, generate_constraints, BlobParams};
pub use io::{load_dataset, parse_dataset, read_assignment, write_assignment, LoadOptions};
pub use metrics::{adjusted_rand_index, verify_labels, Verification};

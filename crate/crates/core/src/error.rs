use thiserror::Error;

use crate::model::Assignment;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("constraint pairs point {0} with itself")]
    SelfConstraint(usize),

    /// Some pair is must-linked (possibly transitively) and cannot-linked.
    #[error("points {0} and {1} are both must-linked and cannot-linked")]
    ContradictoryConstraints(usize, usize),

    #[error("no feasible clustering with {k} clusters was found")]
    Infeasible { k: usize },

    /// The exact assignment search ran out of nodes or time before proving optimality.
    #[error("search budget exhausted")]
    BudgetExhausted { best: Option<(Assignment, f64)> },

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("selected swaps are not mutually compatible")]
    ConflictingSelection,

    /// Classic COP-k-means reached a super-node with no admissible cluster.
    #[error("no admissible cluster for super-node {node}")]
    AssignmentDeadlock { node: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

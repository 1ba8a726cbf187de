//! Kempe-swap assignment at fixed centroids.

use crate::kempe::{swap_round, swap_to_fixed_point, Scope, SwapSettings};
use crate::model::{Assignment, Centroids, Problem};

/// One round of simultaneous improving Kempe swaps. Returns `u` unchanged
/// at a fixed point; otherwise inertia at `mu` strictly decreases.
pub fn ks_assignment(problem: &Problem, u: &Assignment, mu: &Centroids, settings: &SwapSettings) -> Assignment {
    swap_round(problem, u, mu, settings, Scope::default()).assignment
}

/// Repeats [`ks_assignment`] until no improving chain remains.
pub fn ks_assignment_converge(problem: &Problem, u: &Assignment, mu: &Centroids, settings: &SwapSettings) -> Assignment {
    swap_to_fixed_point(problem, u, mu, settings, Scope::default())
}

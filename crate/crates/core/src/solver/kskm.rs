//! Kempe Swap K-Means main loop.

use std::time::Instant;

use crate::coloring::dsatur_assignment;
use crate::error::{Error, Result};
use crate::gcp::{solve_gcp, GcpInstance, GcpMode, GcpOutcome};
use crate::kempe::{multi_kempe_assignment, swap_round, Scope};
use crate::model::{Assignment, Centroids, Problem};
use crate::solver::perturb::ks_perturb;
use crate::solver::shift::{ks_shift, relocate_centroids};
use crate::solver::{Mode, Solution, SolverConfig, Trace};

/// Result of one local search.
#[derive(Debug, Clone)]
pub struct InnerLoop {
    pub assignment: Assignment,
    pub centroids: Centroids,
    pub inertia: f64,
    /// Inertia after each centroid update, starting with the entry state.
    pub steps: Vec<f64>,
    pub iterations: usize,
}

/// At a Kempe fixed point, tries to escape: three-cluster rotations when
/// enabled, then (in `KskmE` mode) the first cheaper exact assignment.
fn escape(problem: &Problem, u: &Assignment, mu: &Centroids, config: &SolverConfig) -> Option<Assignment> {
    if config.multi_kempe {
        let rotated = multi_kempe_assignment(problem, u, mu, &config.swaps);
        if rotated != *u {
            return Some(rotated);
        }
    }
    if config.mode == Mode::KskmE {
        let inst = GcpInstance::from_problem(problem, mu)
            .with_mode(GcpMode::FirstImproving)
            .with_incumbent(problem.inertia_at(u, mu))
            .with_budget(config.gcp_budget);
        if let Ok(GcpOutcome::Solved { assignment, .. }) = solve_gcp(&inst) {
            return Some(assignment);
        }
    }
    None
}

/// Alternates one Kempe-swap round and a centroid update until neither
/// moves the inertia by more than the relative tolerance. Empty clusters
/// keep their previous centroid, taken from `fallback` at entry.
pub fn inner_loop(problem: &Problem, u: &Assignment, fallback: &Centroids, config: &SolverConfig, started: Instant) -> InnerLoop {
    let mut u = u.clone();
    let mut mu = problem.centroids_of(&u, Some(fallback)).expect("fallback covers empty clusters");
    let mut inertia = problem.point_inertia(&u, &mu);
    let mut steps = vec![inertia];
    let mut iterations = 0;
    while iterations < config.max_inner {
        if config.time_limit.is_some_and(|t| started.elapsed() >= t) {
            break;
        }
        iterations += 1;
        let round = swap_round(problem, &u, &mu, &config.swaps, Scope::default());
        let next = if round.applied > 0 {
            round.assignment
        } else {
            match escape(problem, &u, &mu, config) {
                Some(next) => next,
                None => break,
            }
        };
        let next_mu = problem.centroids_of(&next, Some(&mu)).expect("fallback covers empty clusters");
        let next_inertia = problem.point_inertia(&next, &next_mu);
        let gain = inertia - next_inertia;
        steps.push(next_inertia);
        u = next;
        mu = next_mu;
        inertia = next_inertia;
        if gain <= config.convergence_tol * inertia.abs() {
            break;
        }
    }
    InnerLoop { assignment: u, centroids: mu, inertia, steps, iterations }
}

/// Initial coloring: DSATUR with nearest centroids, classic DSATUR, and
/// finally (when enabled) any feasible exact assignment.
fn initial_assignment(problem: &Problem, mu: &Centroids, config: &SolverConfig) -> Result<Assignment> {
    match dsatur_assignment(problem, mu, config.init_alpha, &config.swaps) {
        Ok((u, _)) => Ok(u),
        Err(Error::Infeasible { k }) if config.exact_init => {
            let inst = GcpInstance::from_problem(problem, mu).with_mode(GcpMode::FirstImproving).with_budget(config.gcp_budget);
            match solve_gcp(&inst) {
                Ok(GcpOutcome::Solved { assignment, .. }) => Ok(assignment),
                Err(e @ Error::Infeasible { .. }) => Err(e),
                _ => Err(Error::Infeasible { k }),
            }
        }
        Err(e) => Err(e),
    }
}

/// Kempe Swap K-Means. Each mutation (perturbation or reposition) starts
/// from the current solution; the best solution seen is returned.
pub fn solve_kskm(problem: &Problem, config: &SolverConfig) -> Result<Solution> {
    let started = Instant::now();
    config.validate(problem)?;
    let mut rng = config.rng();
    let mu0 = config.start_centroids(problem, &mut rng);
    let u0 = initial_assignment(problem, &mu0, config)?;

    let mut trace = Trace::default();
    let mut iterations = 0;
    let mut current = inner_loop(problem, &u0, &mu0, config, started);
    iterations += current.iterations;
    let mut best = (current.assignment.clone(), current.centroids.clone(), current.inertia);
    trace.incumbent.push(best.2);
    if config.record_trace {
        trace.inner.push(std::mem::take(&mut current.steps));
    }

    let mut mutations = 0;
    for m in 1..=config.explorations {
        if config.max_mutations.is_some_and(|cap| mutations >= cap) || config.time_limit.is_some_and(|t| started.elapsed() >= t) {
            break;
        }
        mutations += 1;
        let (u, mu) = (&current.assignment, &current.centroids);
        let mutated = if config.is_reposition(m) {
            let (target, matching) = relocate_centroids(problem, mu, config.relocation, &mut rng);
            ks_shift(problem, u, mu, &target, config.shift_alpha, matching, &config.swaps)
        } else {
            ks_perturb(problem, u, mu, &config.swaps, &mut rng).0
        };
        let fallback = current.centroids.clone();
        current = inner_loop(problem, &mutated, &fallback, config, started);
        iterations += current.iterations;
        if current.inertia < best.2 {
            best = (current.assignment.clone(), current.centroids.clone(), current.inertia);
        }
        trace.incumbent.push(best.2);
        if config.record_trace {
            trace.inner.push(std::mem::take(&mut current.steps));
        }
    }

    let mut solution = Solution::finish(problem, best.0, &best.1, started)?;
    solution.iterations = iterations;
    solution.mutations = mutations;
    solution.trace = config.record_trace.then_some(trace);
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ConstraintSet;
    use crate::data::Dataset;
    use crate::kmeans::{lloyd, nearest};

    fn blobs() -> Dataset {
        let mut pts = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (6.0, 0.0), (0.0, 6.0)] {
            for i in 0..10 {
                let t = i as f64;
                pts.push(cx + (t * 1.3).sin());
                pts.push(cy + (t * 0.7).cos());
            }
        }
        Dataset::from_flat("blobs", 30, 2, pts, None).unwrap()
    }

    #[test]
    fn unconstrained_first_local_search_matches_lloyd() {
        let data = blobs();
        let p = Problem::new(data.clone(), ConstraintSet::empty()).unwrap();
        let mu0 = Centroids::new(3, 2, vec![0.5, 0.5, 5.0, 1.0, 1.0, 5.0]).unwrap();
        let mut cfg = SolverConfig::new(3, Mode::Kskm).with_initial_centroids(mu0.clone());
        cfg.max_mutations = Some(0);
        let sol = solve_kskm(&p, &cfg).unwrap();
        let oracle = lloyd(&data, &mu0, 1000);
        assert!((sol.inertia - oracle.inertia).abs() <= 1e-9 * oracle.inertia);
        for i in 0..30 {
            let best = nearest(&sol.centroids, data.row(i)).1;
            let mine = crate::data::squared_distance(data.row(i), sol.centroids.get(sol.assignment.cluster_of(i)));
            assert!(mine <= best + 1e-12);
        }
    }

    #[test]
    fn triangle_with_three_clusters_is_colored() {
        let data = Dataset::from_flat("t", 4, 1, vec![0.0, 0.1, 0.2, 5.0], None).unwrap();
        let cons = ConstraintSet::new([], [(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = Problem::new(data, cons).unwrap();
        for seed in 0..5 {
            let cfg = SolverConfig::new(3, Mode::Kskm).with_seed(seed).with_explorations(10);
            let sol = solve_kskm(&p, &cfg).unwrap();
            assert!(sol.feasible);
            assert!(p.constraints().is_satisfied_by(&sol.point_labels(&p)));
        }
    }

    #[test]
    fn incumbent_never_increases() {
        let data = blobs();
        let cons = ConstraintSet::new([(0, 11), (3, 25)], [(1, 2), (12, 13), (20, 4)]).unwrap();
        let p = Problem::new(data, cons).unwrap();
        let cfg = SolverConfig::new(3, Mode::Kskm).with_seed(4).with_explorations(25).with_trace();
        let sol = solve_kskm(&p, &cfg).unwrap();
        let trace = sol.trace.unwrap();
        assert_eq!(trace.incumbent.len(), 26);
        assert!(trace.incumbent.windows(2).all(|w| w[1] <= w[0]));
        for steps in &trace.inner {
            assert!(steps.windows(2).all(|w| w[1] <= w[0]));
        }
        assert!((sol.inertia - trace.incumbent.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn same_seed_same_solution() {
        let p = Problem::new(blobs(), ConstraintSet::new([], [(0, 1), (10, 11)]).unwrap()).unwrap();
        let cfg = SolverConfig::new(3, Mode::Kskm).with_seed(21).with_explorations(15);
        let a = solve_kskm(&p, &cfg).unwrap();
        let b = solve_kskm(&p, &cfg).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.inertia.to_bits(), b.inertia.to_bits());
    }

    #[test]
    fn exact_escape_mode_runs() {
        let p = Problem::new(blobs(), ConstraintSet::new([(0, 10)], [(0, 1), (10, 20)]).unwrap()).unwrap();
        let cfg = SolverConfig::new(3, Mode::KskmE).with_seed(2).with_explorations(5);
        let e = solve_kskm(&p, &cfg).unwrap();
        assert!(e.feasible);
    }
}

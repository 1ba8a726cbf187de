//! COP-K-Means baselines: greedy assignment in data order, and in DSATUR order.

use std::time::Instant;

use crate::coloring::dsatur_nearest;
use crate::error::{Error, Result};
use crate::model::{Assignment, Centroids, Problem};
use crate::solver::{Solution, SolverConfig};

/// Super-nodes in id order (the order of their first data point), each to
/// the nearest cluster not used by an already placed neighbour.
pub fn ordered_assignment(problem: &Problem, mu: &Centroids) -> Result<Assignment> {
    let g = problem.graph();
    let k = mu.k();
    let mut colors: Vec<Option<usize>> = vec![None; g.len()];
    for v in 0..g.len() {
        let mut best: Option<(usize, f64)> = None;
        for c in 0..k {
            if g.neighbors(v).iter().any(|&w| colors[w] == Some(c)) {
                continue;
            }
            let d = problem.node_cost(v, mu.get(c));
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c, d));
            }
        }
        match best {
            Some((c, _)) => colors[v] = Some(c),
            None => return Err(Error::AssignmentDeadlock { node: g.members(v)[0] }),
        }
    }
    Assignment::new(colors.into_iter().map(|c| c.expect("all placed")).collect(), k)
}

/// Alternates `assign` and centroid updates until the assignment repeats.
fn alternate<F>(problem: &Problem, config: &SolverConfig, mut assign: F) -> Result<Solution>
where
    F: FnMut(&Centroids) -> Result<Assignment>,
{
    let started = Instant::now();
    config.validate(problem)?;
    let mut rng = config.rng();
    let mut mu = config.start_centroids(problem, &mut rng);
    let mut prev: Option<Assignment> = None;
    let mut best: Option<(Assignment, Centroids, f64)> = None;
    let mut iterations = 0;
    while iterations < config.max_inner.max(config.explorations) {
        if config.time_limit.is_some_and(|t| started.elapsed() >= t) {
            break;
        }
        iterations += 1;
        let u = assign(&mu)?;
        let next_mu = problem.centroids_of(&u, Some(&mu))?;
        let inertia = problem.point_inertia(&u, &next_mu);
        if best.as_ref().is_none_or(|b| inertia < b.2) {
            best = Some((u.clone(), next_mu.clone(), inertia));
        }
        let stable = prev.as_ref() == Some(&u) || next_mu == mu;
        prev = Some(u);
        mu = next_mu;
        if stable {
            break;
        }
    }
    let (u, fallback, _) = best.ok_or(Error::Infeasible { k: config.k })?;
    let mut solution = Solution::finish(problem, u, &fallback, started)?;
    solution.iterations = iterations;
    Ok(solution)
}

/// Classic COP-K-Means; fails with [`Error::AssignmentDeadlock`] when a node
/// finds every cluster blocked.
pub fn solve_copkm(problem: &Problem, config: &SolverConfig) -> Result<Solution> {
    alternate(problem, config, |mu| ordered_assignment(problem, mu))
}

/// COP-K-Means with DSATUR ordering; fails with [`Error::Infeasible`] when
/// the greedy pass gets stuck.
pub fn solve_dsaturkm(problem: &Problem, config: &SolverConfig) -> Result<Solution> {
    alternate(problem, &SolverConfig { max_inner: config.explorations, ..config.clone() }, |mu| {
        dsatur_nearest(problem, mu).ok_or(Error::Infeasible { k: config.k })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ConstraintSet;
    use crate::data::Dataset;
    use crate::kmeans::lloyd;
    use crate::solver::Mode;

    fn data_1d(points: &[f64]) -> Dataset {
        Dataset::from_flat("t", points.len(), 1, points.to_vec(), None).unwrap()
    }

    #[test]
    fn unconstrained_copkm_is_lloyd() {
        let data = data_1d(&[0.0, 0.5, 1.0, 4.0, 4.5, 9.0, 9.5, 10.0]);
        let p = Problem::new(data.clone(), ConstraintSet::empty()).unwrap();
        let mu0 = Centroids::new(3, 1, vec![0.0, 4.0, 8.0]).unwrap();
        let oracle = lloyd(&data, &mu0, 100);
        for mode in [Mode::Copkm, Mode::Dsaturkm] {
            let cfg = SolverConfig::new(3, mode).with_initial_centroids(mu0.clone());
            let sol = crate::solver::solve(&p, &cfg).unwrap();
            assert_eq!(sol.assignment.as_slice(), oracle.labels.as_slice(), "{mode}");
            assert!((sol.inertia - oracle.inertia).abs() < 1e-12);
        }
    }

    #[test]
    fn cannot_link_pushes_to_second_nearest() {
        let p = Problem::new(data_1d(&[0.0, 0.1]), ConstraintSet::new([], [(0, 1)]).unwrap()).unwrap();
        let mu = Centroids::new(2, 1, vec![0.0, 5.0]).unwrap();
        assert_eq!(ordered_assignment(&p, &mu).unwrap().as_slice(), &[0, 1]);
    }

    #[test]
    fn data_order_deadlocks_where_dsatur_succeeds() {
        // path 0 - 2 - 1: nodes 0 and 1 take different clusters before node 2 is reached
        let p = Problem::new(data_1d(&[0.0, 5.0, 2.5]), ConstraintSet::new([], [(0, 2), (1, 2)]).unwrap()).unwrap();
        let mu = Centroids::new(2, 1, vec![0.0, 5.0]).unwrap();
        assert!(matches!(ordered_assignment(&p, &mu), Err(Error::AssignmentDeadlock { node: 2 })));
        let u = dsatur_nearest(&p, &mu).unwrap();
        assert!(u.is_proper(p.graph()));
        let cfg = SolverConfig::new(2, Mode::Copkm).with_initial_centroids(mu.clone());
        assert!(solve_copkm(&p, &cfg).is_err());
        assert!(solve_dsaturkm(&p, &SolverConfig { mode: Mode::Dsaturkm, ..cfg }).is_ok());
    }

    #[test]
    fn triangle_k3_dsaturkm_is_proper() {
        let p = Problem::new(data_1d(&[0.0, 0.1, 0.2]), ConstraintSet::new([], [(0, 1), (1, 2), (0, 2)]).unwrap()).unwrap();
        let sol = solve_dsaturkm(&p, &SolverConfig::new(3, Mode::Dsaturkm).with_explorations(5)).unwrap();
        assert!(sol.feasible);
    }
}

//! Centroid reposition: move the current centroids toward a target set,
//! matched cluster by cluster, then reassign by Kempe swaps.

use rand::Rng;

use crate::hungarian::hungarian;
use crate::kempe::SwapSettings;
use crate::kmeans::{kmeans_plus_plus, lloyd};
use crate::model::{Assignment, Centroids, Problem};
use crate::solver::assign::ks_assignment_converge;
use crate::solver::RelocationStrategy;

/// How target centroids are paired with current clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matching {
    /// Minimum-cost assignment between clusters and targets.
    Hungarian,
    /// Target `c` belongs to cluster `c`.
    Identity,
}

/// `cost[i][j]`: inertia of cluster `i` of `u` if its centroid were `target[j]`.
pub fn matching_costs(problem: &Problem, u: &Assignment, target: &Centroids) -> Vec<f64> {
    let k = u.k();
    let mut cost = vec![0.0; k * k];
    for v in 0..u.len() {
        let i = u.cluster_of(v);
        for j in 0..k {
            cost[i * k + j] += problem.node_cost(v, target.get(j));
        }
    }
    cost
}

/// Blended centroids `(1 − α) μ_i + α target_{π(i)}`.
pub fn shifted_centroids(
    problem: &Problem,
    u: &Assignment,
    current: &Centroids,
    target: &Centroids,
    alpha: f64,
    matching: Matching,
) -> Centroids {
    let k = current.k();
    let perm = match matching {
        Matching::Hungarian => hungarian(&matching_costs(problem, u, target), k).0,
        Matching::Identity => (0..k).collect(),
    };
    let mut mu = current.clone();
    for (i, &j) in perm.iter().enumerate() {
        let row: Vec<f64> = current.get(i).iter().zip(target.get(j)).map(|(a, b)| (1.0 - alpha) * a + alpha * b).collect();
        mu.set(i, &row);
    }
    mu
}

/// Shifts toward `target` and runs Kempe swaps to a fixed point there.
pub fn ks_shift(
    problem: &Problem,
    u: &Assignment,
    current: &Centroids,
    target: &Centroids,
    alpha: f64,
    matching: Matching,
    settings: &SwapSettings,
) -> Assignment {
    let mu = shifted_centroids(problem, u, current, target, alpha, matching);
    ks_assignment_converge(problem, u, &mu, settings)
}

/// Reposition targets and the matching they need.
pub fn relocate_centroids<R: Rng + ?Sized>(
    problem: &Problem,
    current: &Centroids,
    strategy: RelocationStrategy,
    rng: &mut R,
) -> (Centroids, Matching) {
    let data = problem.data();
    match strategy {
        RelocationStrategy::RandomSubstitute => {
            let mut mu = current.clone();
            let c = rng.random_range(0..mu.k());
            let i = rng.random_range(0..data.len());
            mu.set(c, data.row(i));
            (mu, Matching::Identity)
        }
        RelocationStrategy::UnconstrainedKmeans => {
            let init = kmeans_plus_plus(data, current.k(), rng);
            (lloyd(data, &init, 300).centroids, Matching::Hungarian)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ConstraintSet;
    use crate::data::Dataset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn problem(points: &[f64]) -> Problem {
        let data = Dataset::from_flat("t", points.len(), 1, points.to_vec(), None).unwrap();
        Problem::new(data, ConstraintSet::empty()).unwrap()
    }

    #[test]
    fn shifting_to_itself_is_a_no_op() {
        let p = problem(&[0.0, 1.0, 10.0, 11.0]);
        let u = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let mu = p.centroids_of(&u, None).unwrap();
        for alpha in [0.3, 1.0] {
            assert_eq!(shifted_centroids(&p, &u, &mu, &mu, alpha, Matching::Hungarian), mu);
            assert_eq!(ks_shift(&p, &u, &mu, &mu, alpha, Matching::Hungarian, &SwapSettings::default()), u);
        }
    }

    #[test]
    fn swapped_targets_are_matched_back() {
        let p = problem(&[0.0, 1.0, 10.0, 11.0]);
        let u = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let mu = p.centroids_of(&u, None).unwrap();
        let target = Centroids::new(2, 1, vec![10.0, 0.0]).unwrap();
        let out = shifted_centroids(&p, &u, &mu, &target, 1.0, Matching::Hungarian);
        assert_eq!(out.as_flat(), &[0.0, 10.0]);
        let half = shifted_centroids(&p, &u, &mu, &target, 0.5, Matching::Identity);
        assert_eq!(half.as_flat(), &[5.25, 5.25]);
    }

    #[test]
    fn random_substitute_with_one_cluster() {
        let p = problem(&[2.0, 4.0, 8.0]);
        let mu = Centroids::new(1, 1, vec![100.0]).unwrap();
        let (t, m) = relocate_centroids(&p, &mu, RelocationStrategy::RandomSubstitute, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(m, Matching::Identity);
        assert!([2.0, 4.0, 8.0].contains(&t.get(0)[0]));
    }

    #[test]
    fn kmeans_targets_find_blobs() {
        let p = problem(&[0.0, 0.1, 10.0, 10.1]);
        let mu = Centroids::new(2, 1, vec![0.0, 1.0]).unwrap();
        let (t, m) = relocate_centroids(&p, &mu, RelocationStrategy::UnconstrainedKmeans, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(m, Matching::Hungarian);
        let mut cs = t.as_flat().to_vec();
        cs.sort_by(f64::total_cmp);
        assert!((cs[0] - 0.05).abs() < 1e-12 && (cs[1] - 10.05).abs() < 1e-12);
    }

    #[test]
    fn reposition_choice_is_reproducible() {
        let p = problem(&[2.0, 4.0, 8.0, 9.0]);
        let mu = Centroids::new(2, 1, vec![0.0, 1.0]).unwrap();
        let a = relocate_centroids(&p, &mu, RelocationStrategy::RandomSubstitute, &mut ChaCha8Rng::seed_from_u64(9));
        let b = relocate_centroids(&p, &mu, RelocationStrategy::RandomSubstitute, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}

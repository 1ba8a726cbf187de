//! Centroid perturbation: each centroid is redrawn from the multivariate-t
//! posterior of a Gaussian cluster mean, so loose clusters move further.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::kempe::SwapSettings;
use crate::model::{Assignment, Centroids, Problem};
use crate::solver::assign::ks_assignment_converge;

const RIDGE: f64 = 1e-6;

/// `t` law with location `mean`, scale `L Lᵀ` and `dof` degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationLaw {
    pub mean: Vec<f64>,
    /// Lower Cholesky factor of the scale matrix, row-major `p × p`.
    /// `None` when the law collapses onto `mean`.
    pub chol: Option<Vec<f64>>,
    pub dof: usize,
}

impl PerturbationLaw {
    /// Law for the mean of `points` (rows of length `dim`): scale is the
    /// sample covariance over `|C|`, with `|C| − 1` degrees of freedom.
    /// Singular scales get a small ridge; a single point or identical points
    /// give a point mass.
    pub fn from_points(points: &[&[f64]], dim: usize) -> Self {
        let m = points.len();
        let mut mean = vec![0.0; dim];
        for y in points {
            mean.iter_mut().zip(y.iter()).for_each(|(s, x)| *s += x);
        }
        mean.iter_mut().for_each(|s| *s /= m.max(1) as f64);
        if m < 2 {
            return Self { mean, chol: None, dof: 0 };
        }
        let mut scale = vec![0.0; dim * dim];
        for y in points {
            for a in 0..dim {
                let da = y[a] - mean[a];
                for b in 0..=a {
                    scale[a * dim + b] += da * (y[b] - mean[b]);
                }
            }
        }
        let denom = ((m - 1) * m) as f64;
        for a in 0..dim {
            for b in 0..=a {
                scale[a * dim + b] /= denom;
                scale[b * dim + a] = scale[a * dim + b];
            }
        }
        let trace: f64 = (0..dim).map(|a| scale[a * dim + a]).sum();
        if trace <= 0.0 {
            return Self { mean, chol: None, dof: m - 1 };
        }
        let chol = cholesky(&scale, dim).or_else(|| {
            let ridge = RIDGE * trace / dim as f64;
            let mut s = scale.clone();
            (0..dim).for_each(|a| s[a * dim + a] += ridge);
            cholesky(&s, dim)
        });
        Self { mean, chol, dof: m - 1 }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let Some(l) = &self.chol else {
            return self.mean.clone();
        };
        let p = self.dim();
        let z: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let w = ChiSquared::new(self.dof as f64).expect("dof is positive").sample(rng);
        let scale = (self.dof as f64 / w).sqrt();
        (0..p).map(|a| self.mean[a] + scale * (0..=a).map(|b| l[a * p + b] * z[b]).sum::<f64>()).collect()
    }
}

/// Lower Cholesky factor, or `None` if `a` is not positive definite.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|t| l[i * n + t] * l[j * n + t]).sum();
            if i == j {
                let d = a[i * n + i] - s;
                if d <= 0.0 || !d.is_finite() {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (a[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// One law per cluster of `u`; empty clusters get `None`.
pub fn cluster_laws(problem: &Problem, u: &Assignment) -> Vec<Option<PerturbationLaw>> {
    let mut members: Vec<Vec<&[f64]>> = vec![Vec::new(); u.k()];
    for i in 0..problem.data().len() {
        members[u.cluster_of(problem.node_of(i))].push(problem.data().row(i));
    }
    members.iter().map(|pts| (!pts.is_empty()).then(|| PerturbationLaw::from_points(pts, problem.dim()))).collect()
}

/// Draws perturbed centroids for `u`. Each cluster samples from its own
/// stream of a generator seeded once from `rng`, so draws for one cluster
/// do not depend on the others. Empty clusters keep their `current` centroid.
pub fn perturbed_centroids<R: Rng + ?Sized>(problem: &Problem, u: &Assignment, current: &Centroids, rng: &mut R) -> Centroids {
    let seed: u64 = rng.random();
    let mut mu = current.clone();
    for (c, law) in cluster_laws(problem, u).into_iter().enumerate() {
        if let Some(law) = law {
            let mut stream = ChaCha8Rng::seed_from_u64(seed);
            stream.set_stream(c as u64);
            mu.set(c, &law.sample(&mut stream));
        }
    }
    mu
}

/// Perturbs the centroids of `u` and reassigns by Kempe swaps to a fixed
/// point under the perturbed centroids. Returns the new assignment and the
/// centroids it was built against.
pub fn ks_perturb<R: Rng + ?Sized>(
    problem: &Problem,
    u: &Assignment,
    current: &Centroids,
    settings: &SwapSettings,
    rng: &mut R,
) -> (Assignment, Centroids) {
    let mu = perturbed_centroids(problem, u, current, rng);
    (ks_assignment_converge(problem, u, &mu, settings), mu)
}

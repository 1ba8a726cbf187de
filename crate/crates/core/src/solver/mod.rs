//! Full clustering algorithms built on the Kempe-swap machinery.
//!
//! [`solve`] dispatches on [`Mode`]: Kempe Swap K-Means with or without the
//! exact-assignment escape, and the two COP-K-Means baselines.

pub mod assign;
mod baselines;
mod kskm;
pub mod perturb;
pub mod shift;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcp::GcpBudget;
use crate::kempe::SwapSettings;
use crate::kmeans::kmeans_plus_plus;
use crate::model::{Assignment, Centroids, Problem};

pub use assign::{ks_assignment, ks_assignment_converge};
pub use baselines::{solve_copkm, solve_dsaturkm};
pub use kskm::{inner_loop, solve_kskm, InnerLoop};
pub use perturb::{ks_perturb, PerturbationLaw};
pub use shift::{ks_shift, relocate_centroids, Matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Kskm,
    KskmE,
    Copkm,
    Dsaturkm,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Kskm, Mode::KskmE, Mode::Copkm, Mode::Dsaturkm];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Kskm => "kskm",
            Mode::KskmE => "kskm_e",
            Mode::Copkm => "copkm",
            Mode::Dsaturkm => "dsaturkm",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown mode `{s}`")))
    }
}

/// Where reposition targets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelocationStrategy {
    /// Plain k-means on the raw data, matched to the current clusters.
    #[default]
    UnconstrainedKmeans,
    /// One centroid replaced by a random data point.
    RandomSubstitute,
}

impl FromStr for RelocationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unconstrained_kmeans" | "kmeans" => Ok(Self::UnconstrainedKmeans),
            "random_substitute" | "random" => Ok(Self::RandomSubstitute),
            _ => Err(Error::InvalidConfig(format!("unknown relocation strategy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub k: usize,
    pub mode: Mode,
    /// Number of mutations (explorations) after the first local search.
    pub explorations: usize,
    /// Share of mutations that are repositions; the rest are perturbations.
    pub reposition_share: f64,
    /// Step size toward reposition targets.
    pub shift_alpha: f64,
    /// Step size of the shift that finishes the DSATUR initialization.
    pub init_alpha: f64,
    pub relocation: RelocationStrategy,
    pub seed: u64,
    /// Inner loops stop once the relative inertia decrease falls below this.
    pub convergence_tol: f64,
    pub time_limit: Option<Duration>,
    pub max_mutations: Option<usize>,
    /// Starting centroids; k-means++ on the raw data when absent.
    pub initial_centroids: Option<Centroids>,
    /// Fall back to exact fixed-centroid assignment when DSATUR cannot find a coloring.
    pub exact_init: bool,
    /// Try three-cluster rotations at two-cluster fixed points.
    pub multi_kempe: bool,
    pub swaps: SwapSettings,
    pub gcp_budget: GcpBudget,
    /// Cap on centroid updates per inner loop.
    pub max_inner: usize,
    pub record_trace: bool,
}

impl SolverConfig {
    pub fn new(k: usize, mode: Mode) -> Self {
        Self {
            k,
            mode,
            explorations: 200,
            reposition_share: 0.2,
            shift_alpha: 1.0,
            init_alpha: 1.0,
            relocation: RelocationStrategy::default(),
            seed: 0,
            convergence_tol: 1e-10,
            time_limit: None,
            max_mutations: None,
            initial_centroids: None,
            exact_init: false,
            multi_kempe: false,
            swaps: SwapSettings::default(),
            gcp_budget: GcpBudget::default(),
            max_inner: 10_000,
            record_trace: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_explorations(mut self, l: usize) -> Self {
        self.explorations = l;
        self
    }

    pub fn with_initial_centroids(mut self, mu: Centroids) -> Self {
        self.initial_centroids = Some(mu);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn validate(&self, problem: &Problem) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if !(self.shift_alpha > 0.0 && self.shift_alpha <= 1.0) || !(self.init_alpha > 0.0 && self.init_alpha <= 1.0) {
            return bad("step sizes must lie in (0, 1]");
        }
        if self.explorations == 0 {
            return bad("explorations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.reposition_share) {
            return bad("reposition share must lie in [0, 1]");
        }
        if !(self.convergence_tol >= 0.0) {
            return bad("convergence tolerance must be non-negative");
        }
        if let Some(mu) = &self.initial_centroids {
            if mu.k() != self.k || mu.dim() != problem.dim() {
                return bad("initial centroids do not match k and the data dimension");
            }
        }
        if problem.n_nodes() < self.k {
            return Err(Error::Infeasible { k: self.k });
        }
        Ok(())
    }

    /// Mutation `m` (1-based) is a reposition when the running count of
    /// repositions steps up at `m`. A share of 0.2 makes every fifth one a reposition.
    pub fn is_reposition(&self, m: usize) -> bool {
        let share = self.reposition_share;
        m > 0 && (m as f64 * share).floor() > ((m - 1) as f64 * share).floor()
    }

    /// The generator every mode starts from.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Configured centroids, else k-means++ drawn from `rng`.
    pub fn start_centroids(&self, problem: &Problem, rng: &mut ChaCha8Rng) -> Centroids {
        match &self.initial_centroids {
            Some(mu) => mu.clone(),
            None => kmeans_plus_plus(problem.data(), self.k, rng),
        }
    }
}

/// Inertia history of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    /// Best inertia so far, after the first local search and after each mutation.
    pub incumbent: Vec<f64>,
    /// Inertia after each centroid update, one list per inner loop.
    pub inner: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub assignment: Assignment,
    pub centroids: Centroids,
    pub inertia: f64,
    pub iterations: usize,
    pub mutations: usize,
    pub wall_time: Duration,
    pub feasible: bool,
    pub trace: Option<Trace>,
}

impl Solution {
    /// Builds the final record: centroids and inertia are recomputed from `u`.
    pub(crate) fn finish(problem: &Problem, u: Assignment, fallback: &Centroids, started: Instant) -> Result<Self> {
        let u = repair_empty_clusters(problem, u, fallback)?;
        let centroids = update_centroids(problem, &u)?;
        let inertia = problem.point_inertia(&u, &centroids);
        let feasible = u.is_proper(problem.graph()) && u.empty_clusters().is_empty();
        Ok(Self { assignment: u, centroids, inertia, iterations: 0, mutations: 0, wall_time: started.elapsed(), feasible, trace: None })
    }

    /// Cluster id of every data point.
    pub fn point_labels(&self, problem: &Problem) -> Vec<usize> {
        problem.expand(&self.assignment)
    }
}

/// Cluster means over data points; fails on an empty cluster.
pub fn update_centroids(problem: &Problem, u: &Assignment) -> Result<Centroids> {
    problem.centroids_of(u, None)
}

/// Fills each empty cluster with one super-node taken from a cluster that
/// keeps at least one other node, picking the node farthest from its
/// current centroid by weighted squared distance. Moving into an empty
/// cluster never breaks a cannot-link edge.
pub fn repair_empty_clusters(problem: &Problem, mut u: Assignment, fallback: &Centroids) -> Result<Assignment> {
    let stats = problem.stats();
    while let Some(&c) = u.empty_clusters().first() {
        let mu = problem.centroids_of(&u, Some(fallback))?;
        let clusters = u.clusters();
        let pick = (0..u.len())
            .filter(|&v| clusters[u.cluster_of(v)].len() >= 2)
            .map(|v| {
                let src = u.cluster_of(v);
                let gain = stats.weight(v) * crate::data::squared_distance(stats.mean(v), mu.get(src));
                (v, gain)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(v, _)| v);
        match pick {
            Some(v) => u.set(v, c),
            None => return Err(Error::Infeasible { k: u.k() }),
        }
    }
    Ok(u)
}

/// Runs the algorithm selected by `config.mode`.
pub fn solve(problem: &Problem, config: &SolverConfig) -> Result<Solution> {
    config.validate(problem)?;
    match config.mode {
        Mode::Kskm | Mode::KskmE => solve_kskm(problem, config),
        Mode::Copkm => solve_copkm(problem, config),
        Mode::Dsaturkm => solve_dsaturkm(problem, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ConstraintSet;
    use crate::data::Dataset;

    fn problem(points: &[f64], ml: &[(usize, usize)]) -> Problem {
        let data = Dataset::from_flat("t", points.len(), 1, points.to_vec(), None).unwrap();
        Problem::new(data, ConstraintSet::new(ml.iter().copied(), []).unwrap()).unwrap()
    }

    #[test]
    fn centroid_of_one_cluster() {
        let p = problem(&[0.0, 10.0], &[]);
        let u = Assignment::new(vec![0, 0], 1).unwrap();
        assert_eq!(update_centroids(&p, &u).unwrap().get(0), &[5.0]);
    }

    #[test]
    fn centroid_weights_super_nodes_by_size() {
        // points 0 and 2 must-linked, 7 alone
        let p = problem(&[0.0, 7.0, 2.0], &[(0, 2)]);
        let u = Assignment::new(vec![0; p.n_nodes()], 1).unwrap();
        assert_eq!(update_centroids(&p, &u).unwrap().get(0), &[3.0]);
    }

    #[test]
    fn centroid_update_is_stable_at_fixed_point() {
        let p = problem(&[0.0, 1.0, 10.0, 11.0], &[]);
        let u = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let mu = update_centroids(&p, &u).unwrap();
        let again = ks_assignment_converge(&p, &u, &mu, &SwapSettings::default());
        assert_eq!(again, u);
        assert_eq!(update_centroids(&p, &again).unwrap(), mu);
    }

    #[test]
    fn empty_cluster_is_an_error() {
        let p = problem(&[0.0, 1.0], &[]);
        let u = Assignment::new(vec![0, 0], 2).unwrap();
        assert!(matches!(update_centroids(&p, &u), Err(Error::EmptyCluster(1))));
    }

    #[test]
    fn repair_moves_the_worst_fit_node() {
        let p = problem(&[0.0, 1.0, 9.0], &[]);
        let u = Assignment::new(vec![0, 0, 0], 2).unwrap();
        let fallback = Centroids::zeros(2, 1);
        let fixed = repair_empty_clusters(&p, u, &fallback).unwrap();
        assert_eq!(fixed.as_slice(), &[0, 0, 1]);
    }

    #[test]
    fn reposition_schedule_every_fifth() {
        let cfg = SolverConfig::new(2, Mode::Kskm);
        let hits: Vec<usize> = (1..=20).filter(|&m| cfg.is_reposition(m)).collect();
        assert_eq!(hits, vec![5, 10, 15, 20]);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("nope".parse::<Mode>().is_err());
    }
}

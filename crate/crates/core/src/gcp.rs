//! Fixed-centroid assignment as a graph coloring problem.
//!
//! With centroids frozen, choosing clusters is an integer program: every
//! super-node takes one cluster, every cluster is non-empty, and cannot-link
//! neighbours differ; the cost of node `v` in cluster `c` is
//! `D[v][c] = Σ ||y − μ_c||²` over its members. This module solves it by
//! depth-first branch-and-bound, either to optimality or until the first
//! assignment beating an incumbent appears.

use std::time::{Duration, Instant};

use crate::constraints::SuperNodeGraph;
use crate::error::{Error, Result};
use crate::model::{Assignment, Centroids, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcpMode {
    Optimal,
    FirstImproving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcpBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for GcpBudget {
    fn default() -> Self {
        Self { node_limit: 1_000_000, time_limit: Duration::from_secs(60) }
    }
}

#[derive(Debug, Clone)]
pub struct GcpInstance {
    n: usize,
    k: usize,
    dist: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
    pub incumbent_cost: Option<f64>,
    pub mode: GcpMode,
    pub budget: GcpBudget,
}

impl GcpInstance {
    /// `dist` is row-major `|V| × k`.
    pub fn new(k: usize, dist: Vec<f64>, g: &SuperNodeGraph) -> Result<Self> {
        let n = g.len();
        if dist.len() != n * k {
            return Err(Error::LengthMismatch { left: n * k, right: dist.len() });
        }
        if dist.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidConfig("assignment costs must be finite and non-negative".into()));
        }
        let adjacency = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
        Ok(Self { n, k, dist, adjacency, incumbent_cost: None, mode: GcpMode::Optimal, budget: GcpBudget::default() })
    }

    pub fn from_problem(problem: &Problem, mu: &Centroids) -> Self {
        let k = mu.k();
        let dist = (0..problem.n_nodes()).flat_map(|v| (0..k).map(move |c| problem.node_cost(v, mu.get(c)))).collect();
        Self::new(k, dist, problem.graph()).expect("node costs are finite and non-negative")
    }

    pub fn with_incumbent(mut self, cost: f64) -> Self {
        self.incumbent_cost = Some(cost);
        self
    }

    pub fn with_mode(mut self, mode: GcpMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_budget(mut self, budget: GcpBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn dist(&self, v: usize, c: usize) -> f64 {
        self.dist[v * self.k + c]
    }

    pub fn cost(&self, colors: &[usize]) -> f64 {
        colors.iter().enumerate().map(|(v, &c)| self.dist(v, c)).sum()
    }
}

/// Assigned cost plus, for every unassigned node, its cheapest cluster not
/// already taken by an assigned neighbour. Infinite when some unassigned
/// node has no such cluster.
pub fn lower_bound(inst: &GcpInstance, partial: &[Option<usize>]) -> f64 {
    let mut total = 0.0;
    for v in 0..inst.n {
        match partial[v] {
            Some(c) => total += inst.dist(v, c),
            None => {
                let best = (0..inst.k)
                    .filter(|&c| inst.adjacency[v].iter().all(|&w| partial[w] != Some(c)))
                    .map(|c| inst.dist(v, c))
                    .fold(f64::INFINITY, f64::min);
                total += best;
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub enum GcpOutcome {
    Solved { assignment: Assignment, cost: f64, optimal: bool },
    /// No assignment cheaper than the incumbent exists (or none was found in budget).
    NoImprovement,
}

const UNSET: usize = usize::MAX;

struct Search<'a> {
    inst: &'a GcpInstance,
    colors: Vec<usize>,
    forbid: Vec<u32>,
    sat: Vec<usize>,
    min_free: Vec<f64>,
    cluster_size: Vec<usize>,
    empty: usize,
    unassigned: usize,
    assigned_cost: f64,
    free_sum: f64,
    blocked: usize,
    undo: Vec<(usize, f64)>,
    best_cost: f64,
    best: Option<Vec<usize>>,
    nodes: u64,
    started: Instant,
    aborted: bool,
    done: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a GcpInstance, best_cost: f64) -> Self {
        let (n, k) = (inst.n, inst.k);
        let min_free: Vec<f64> = (0..n).map(|v| (0..k).map(|c| inst.dist(v, c)).fold(f64::INFINITY, f64::min)).collect();
        let free_sum = min_free.iter().filter(|d| d.is_finite()).sum();
        let blocked = min_free.iter().filter(|d| !d.is_finite()).count();
        Self {
            inst,
            colors: vec![UNSET; n],
            forbid: vec![0; n * k],
            sat: vec![0; n],
            min_free,
            cluster_size: vec![0; k],
            empty: k,
            unassigned: n,
            assigned_cost: 0.0,
            free_sum,
            blocked,
            undo: Vec::new(),
            best_cost,
            best: None,
            nodes: 0,
            started: Instant::now(),
            aborted: false,
            done: false,
        }
    }

    fn recompute_min(&self, w: usize) -> f64 {
        let k = self.inst.k;
        (0..k).filter(|&c| self.forbid[w * k + c] == 0).map(|c| self.inst.dist(w, c)).fold(f64::INFINITY, f64::min)
    }

    fn set_min(&mut self, w: usize, new: f64) {
        let old = self.min_free[w];
        if old.is_finite() {
            self.free_sum -= old;
        } else {
            self.blocked -= 1;
        }
        if new.is_finite() {
            self.free_sum += new;
        } else {
            self.blocked += 1;
        }
        self.min_free[w] = new;
    }

    fn assign(&mut self, v: usize, c: usize) -> usize {
        let k = self.inst.k;
        let mark = self.undo.len();
        let old = self.min_free[v];
        self.undo.push((v, old));
        self.set_min(v, 0.0);
        self.colors[v] = c;
        self.unassigned -= 1;
        self.assigned_cost += self.inst.dist(v, c);
        if self.cluster_size[c] == 0 {
            self.empty -= 1;
        }
        self.cluster_size[c] += 1;
        for i in 0..self.inst.adjacency[v].len() {
            let w = self.inst.adjacency[v][i];
            if self.colors[w] != UNSET {
                continue;
            }
            self.forbid[w * k + c] += 1;
            if self.forbid[w * k + c] == 1 {
                self.sat[w] += 1;
                if self.inst.dist(w, c) <= self.min_free[w] {
                    let new = self.recompute_min(w);
                    self.undo.push((w, self.min_free[w]));
                    self.set_min(w, new);
                }
            }
        }
        mark
    }

    fn unassign(&mut self, v: usize, c: usize, mark: usize) {
        let k = self.inst.k;
        for i in 0..self.inst.adjacency[v].len() {
            let w = self.inst.adjacency[v][i];
            if self.colors[w] != UNSET {
                continue;
            }
            self.forbid[w * k + c] -= 1;
            if self.forbid[w * k + c] == 0 {
                self.sat[w] -= 1;
            }
        }
        while self.undo.len() > mark {
            let (w, old) = self.undo.pop().expect("undo entries above mark");
            self.set_min(w, old);
        }
        // v's own entry: it holds min_free 0.0 while assigned; restored above
        self.colors[v] = UNSET;
        self.unassigned += 1;
        self.assigned_cost -= self.inst.dist(v, c);
        self.cluster_size[c] -= 1;
        if self.cluster_size[c] == 0 {
            self.empty += 1;
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.nodes >= self.inst.budget.node_limit
            || (self.nodes % 256 == 0 && self.started.elapsed() >= self.inst.budget.time_limit)
        {
            self.aborted = true;
        }
        self.aborted
    }

    fn dfs(&mut self) {
        if self.done || self.out_of_budget() {
            return;
        }
        self.nodes += 1;
        if self.unassigned < self.empty {
            return;
        }
        if self.unassigned == 0 {
            let cost = self.inst.cost(&self.colors);
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = Some(self.colors.clone());
                if self.inst.mode == GcpMode::FirstImproving {
                    self.done = true;
                }
            }
            return;
        }
        if self.blocked > 0 {
            return;
        }
        // assigned nodes hold 0.0 in min_free, so free_sum covers unassigned ones only
        if self.assigned_cost + self.free_sum >= self.best_cost {
            return;
        }
        let inst = self.inst;
        let v = (0..inst.n)
            .filter(|&v| self.colors[v] == UNSET)
            .max_by(|&a, &b| {
                (self.sat[a], inst.adjacency[a].len()).cmp(&(self.sat[b], inst.adjacency[b].len())).then(b.cmp(&a))
            })
            .expect("some node unassigned");
        let k = inst.k;
        let mut children: Vec<usize> = (0..k).filter(|&c| self.forbid[v * k + c] == 0).collect();
        children.sort_by(|&a, &b| inst.dist(v, a).total_cmp(&inst.dist(v, b)).then(a.cmp(&b)));
        for c in children {
            let mark = self.assign(v, c);
            self.dfs();
            self.unassign(v, c, mark);
            if self.done || self.aborted {
                break;
            }
        }
    }
}

/// Branch-and-bound over DSATUR order, cheapest clusters first.
///
/// * `Optimal`: returns the cheapest feasible assignment, proven optimal
///   unless the budget runs out ([`Error::BudgetExhausted`]).
/// * `FirstImproving`: returns the first assignment cheaper than the
///   incumbent, else [`GcpOutcome::NoImprovement`].
///
/// Fails with [`Error::Infeasible`] when the full tree holds no feasible
/// assignment and no incumbent was given.
pub fn solve_gcp(inst: &GcpInstance) -> Result<GcpOutcome> {
    let threshold = inst.incumbent_cost.map_or(f64::INFINITY, |c| c - 1e-9 * c.abs().max(1.0));
    if inst.n < inst.k {
        return match inst.incumbent_cost {
            Some(_) => Ok(GcpOutcome::NoImprovement),
            None => Err(Error::Infeasible { k: inst.k }),
        };
    }
    let mut search = Search::new(inst, threshold);
    search.dfs();
    let found = search.best.take().map(|colors| {
        let cost = inst.cost(&colors);
        (Assignment::new(colors, inst.k).expect("colors below k"), cost)
    });
    match (inst.mode, found, search.aborted) {
        (GcpMode::FirstImproving, Some((assignment, cost)), _) => Ok(GcpOutcome::Solved { assignment, cost, optimal: false }),
        (GcpMode::FirstImproving, None, true) => Ok(GcpOutcome::NoImprovement),
        (GcpMode::Optimal, best, true) => Err(Error::BudgetExhausted { best }),
        (GcpMode::Optimal, Some((assignment, cost)), false) => Ok(GcpOutcome::Solved { assignment, cost, optimal: true }),
        (_, None, false) => match inst.incumbent_cost {
            Some(_) => Ok(GcpOutcome::NoImprovement),
            None => Err(Error::Infeasible { k: inst.k }),
        },
    }
}

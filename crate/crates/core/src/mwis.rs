//! Maximum weighted independent set over improving swaps.
//!
//! Each candidate swap carries a positive weight (its inertia reduction).
//! Candidates sharing a super-node form a clique group (at most one may be
//! chosen) and some pairs are forbidden outright. Small instances are solved
//! exactly by branch-and-bound; large ones by a spectral relaxation on the
//! unit sphere followed by greedy extraction.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MwisInstance {
    weights: Vec<f64>,
    clique_groups: Vec<Vec<usize>>,
    pair_conflicts: Vec<(usize, usize)>,
}

impl MwisInstance {
    pub fn new(weights: Vec<f64>, clique_groups: Vec<Vec<usize>>, pair_conflicts: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidConfig(format!("candidate weight {w} is not strictly positive")));
        }
        let m = weights.len();
        let bad = clique_groups.iter().flatten().copied().chain(pair_conflicts.iter().flat_map(|&(a, b)| [a, b]));
        if let Some(id) = bad.into_iter().find(|&id| id >= m) {
            return Err(Error::IndexOutOfRange { index: id, n: m });
        }
        Ok(Self { weights, clique_groups, pair_conflicts })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn clique_groups(&self) -> &[Vec<usize>] {
        &self.clique_groups
    }

    pub fn pair_conflicts(&self) -> &[(usize, usize)] {
        &self.pair_conflicts
    }

    /// Sorted conflict neighbours per candidate; clique groups expand to all pairs.
    pub fn conflict_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for group in &self.clique_groups {
            for (a, &s) in group.iter().enumerate() {
                for &t in &group[a + 1..] {
                    if s != t {
                        adj[s].push(t);
                        adj[t].push(s);
                    }
                }
            }
        }
        for &(s, t) in &self.pair_conflicts {
            if s != t {
                adj[s].push(t);
                adj[t].push(s);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn is_feasible(&self, chosen: &[usize]) -> bool {
        let adj = self.conflict_adjacency();
        let mut picked = vec![false; self.len()];
        for &s in chosen {
            if s >= self.len() || picked[s] {
                return false;
            }
            picked[s] = true;
        }
        chosen.iter().all(|&s| adj[s].iter().all(|&t| !picked[t]))
    }

    pub fn value(&self, chosen: &[usize]) -> f64 {
        chosen.iter().map(|&s| self.weights[s]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Chosen candidate ids, ascending.
    pub chosen: Vec<usize>,
    pub value: f64,
    /// Set only when branch-and-bound finished within its node limit.
    pub optimal: bool,
}

impl Selection {
    fn from_ids(inst: &MwisInstance, mut chosen: Vec<usize>, optimal: bool) -> Self {
        chosen.sort_unstable();
        let value = inst.value(&chosen);
        Self { chosen, value, optimal }
    }
}

/// Exact for `len() <= exact_limit`, spectral heuristic otherwise.
pub fn select(inst: &MwisInstance, exact_limit: usize, node_limit: u64) -> Selection {
    if inst.len() <= exact_limit {
        solve_exact(inst, node_limit)
    } else {
        solve_heuristic(inst)
    }
}

struct BranchAndBound<'a> {
    weight: Vec<f64>,
    adj: Vec<Vec<usize>>,
    order: &'a [usize],
    blocked: Vec<u32>,
    stack: Vec<usize>,
    best: f64,
    best_set: Vec<usize>,
    nodes: u64,
    node_limit: u64,
    aborted: bool,
}

impl BranchAndBound<'_> {
    fn dfs(&mut self, mut pos: usize, value: f64) {
        if self.nodes >= self.node_limit {
            self.aborted = true;
            return;
        }
        self.nodes += 1;
        if value > self.best {
            self.best = value;
            self.best_set = self.stack.clone();
        }
        let m = self.weight.len();
        while pos < m && self.blocked[pos] > 0 {
            pos += 1;
        }
        if pos == m {
            return;
        }
        let bound: f64 = value + (pos..m).filter(|&r| self.blocked[r] == 0).map(|r| self.weight[r]).sum::<f64>();
        if bound <= self.best {
            return;
        }
        self.stack.push(pos);
        for i in 0..self.adj[pos].len() {
            let t = self.adj[pos][i];
            self.blocked[t] += 1;
        }
        self.dfs(pos + 1, value + self.weight[pos]);
        for i in 0..self.adj[pos].len() {
            let t = self.adj[pos][i];
            self.blocked[t] -= 1;
        }
        self.stack.pop();
        if !self.aborted {
            self.dfs(pos + 1, value);
        }
    }
}

/// Depth-first branch-and-bound, branching on the heaviest free candidate.
pub fn solve_exact(inst: &MwisInstance, node_limit: u64) -> Selection {
    let m = inst.len();
    if m == 0 {
        return Selection { chosen: Vec::new(), value: 0.0, optimal: true };
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| inst.weights[b].total_cmp(&inst.weights[a]).then(a.cmp(&b)));
    let mut pos_of = vec![0; m];
    for (p, &s) in order.iter().enumerate() {
        pos_of[s] = p;
    }
    let id_adj = inst.conflict_adjacency();
    let adj = order.iter().map(|&s| id_adj[s].iter().map(|&t| pos_of[t]).collect()).collect();
    let mut bb = BranchAndBound {
        weight: order.iter().map(|&s| inst.weights[s]).collect(),
        adj,
        order: &order,
        blocked: vec![0; m],
        stack: Vec::new(),
        best: 0.0,
        best_set: Vec::new(),
        nodes: 0,
        node_limit: node_limit.max(1),
        aborted: false,
    };
    bb.dfs(0, 0.0);
    let chosen = bb.best_set.iter().map(|&p| bb.order[p]).collect();
    Selection::from_ids(inst, chosen, !bb.aborted)
}

/// Penalised quadratic form `Q` with `Q_ss = w_s` and `Q_st = −D` on conflicts.
///
/// For binary `u`, `uᵀQu = Σ w_s u_s − 2D·#(chosen conflicting pairs)`; with
/// `D > max_s w_s / 2` every maximiser is a feasible independent set.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyMatrix {
    diagonal: Vec<f64>,
    conflicts: Vec<Vec<usize>>,
    d_penalty: f64,
}

impl PenaltyMatrix {
    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn d_penalty(&self) -> f64 {
        self.d_penalty
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        if s == t {
            self.diagonal[s]
        } else if self.conflicts[s].binary_search(&t).is_ok() {
            -self.d_penalty
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let m = self.len();
        (0..m).map(|s| (0..m).map(|t| self.get(s, t)).collect()).collect()
    }

    /// `out = (Q + shift·I) x`.
    fn shifted_product(&self, x: &[f64], shift: f64, out: &mut [f64]) {
        for s in 0..self.len() {
            let off: f64 = self.conflicts[s].iter().map(|&t| x[t]).sum();
            out[s] = (self.diagonal[s] + shift) * x[s] - self.d_penalty * off;
        }
    }

    /// Upper bound on the spectral radius (Gershgorin).
    fn gershgorin(&self) -> f64 {
        (0..self.len())
            .map(|s| self.diagonal[s].abs() + self.d_penalty * self.conflicts[s].len() as f64)
            .fold(0.0, f64::max)
    }
}

pub fn build_penalty_matrix(inst: &MwisInstance) -> PenaltyMatrix {
    let max_w = inst.weights.iter().copied().fold(0.0, f64::max);
    PenaltyMatrix { diagonal: inst.weights.clone(), conflicts: inst.conflict_adjacency(), d_penalty: 1.01 * 0.5 * max_w }
}

const EIGEN_TOL: f64 = 1e-8;

/// Unit-sphere stationary point of `uᵀQu` with the largest value, by power
/// iteration on `Q + cI` (c from Gershgorin, so the shifted matrix is PSD).
pub fn leading_eigenvector(q: &PenaltyMatrix) -> Vec<f64> {
    let m = q.len();
    let shift = q.gershgorin();
    let mut x = vec![1.0 / (m as f64).sqrt(); m];
    let mut y = vec![0.0; m];
    for _ in 0..10 * m {
        q.shifted_product(&x, shift, &mut y);
        let mut norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            // start vector annihilated; nudge it off the null space
            for (i, v) in y.iter_mut().enumerate() {
                *v = x[i] + 1e-3 * (i + 1) as f64 / m as f64;
            }
            norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let diff = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut y);
        if diff < EIGEN_TOL {
            break;
        }
    }
    x
}

fn greedy(order: &[usize], adj: &[Vec<usize>]) -> Vec<usize> {
    let mut blocked = vec![false; adj.len()];
    let mut chosen = Vec::new();
    for &s in order {
        if blocked[s] {
            continue;
        }
        chosen.push(s);
        blocked[s] = true;
        for &t in &adj[s] {
            blocked[t] = true;
        }
    }
    chosen
}

/// Spectral ordering plus greedy extraction; the result is always feasible
/// and maximal. The weight-ordered greedy set is computed as well and the
/// heavier of the two is returned.
pub fn solve_heuristic(inst: &MwisInstance) -> Selection {
    let m = inst.len();
    if m == 0 {
        return Selection { chosen: Vec::new(), value: 0.0, optimal: false };
    }
    let q = build_penalty_matrix(inst);
    let mut x = leading_eigenvector(&q);
    let corr: f64 = x.iter().zip(&inst.weights).map(|(a, w)| a * w).sum();
    if corr < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let by_weight = |a: &usize, b: &usize| inst.weights[*b].total_cmp(&inst.weights[*a]).then(a.cmp(b));
    let mut spectral: Vec<usize> = (0..m).collect();
    spectral.sort_by(|a, b| x[*b].total_cmp(&x[*a]).then_with(|| by_weight(a, b)));
    let mut heavy: Vec<usize> = (0..m).collect();
    heavy.sort_by(by_weight);

    let adj = &q.conflicts;
    let a = Selection::from_ids(inst, greedy(&spectral, adj), false);
    let b = Selection::from_ids(inst, greedy(&heavy, adj), false);
    if b.value > a.value {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn enumerate(inst: &MwisInstance) -> f64 {
        let m = inst.len();
        let adj = inst.conflict_adjacency();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << m) {
            let ok = (0..m).all(|s| mask & (1 << s) == 0 || adj[s].iter().all(|&t| mask & (1 << t) == 0));
            if ok {
                let v: f64 = (0..m).filter(|s| mask & (1 << s) != 0).map(|s| inst.weights()[s]).sum();
                best = best.max(v);
            }
        }
        best
    }

    fn chain() -> MwisInstance {
        MwisInstance::new(vec![5.0, 3.0, 4.0], vec![], vec![(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn exact_on_chain() {
        let sel = solve_exact(&chain(), 1_000);
        assert_eq!(sel.chosen, vec![0, 2]);
        assert_eq!(sel.value, 9.0);
        assert!(sel.optimal);
        assert_eq!(enumerate(&chain()), 9.0);
    }

    #[test]
    fn exact_trivial_cases() {
        let one = MwisInstance::new(vec![2.0], vec![], vec![]).unwrap();
        assert_eq!(solve_exact(&one, 10).chosen, vec![0]);
        let clique = MwisInstance::new(vec![1.0, 7.0, 3.0], vec![vec![0, 1, 2]], vec![]).unwrap();
        assert_eq!(solve_exact(&clique, 100).chosen, vec![1]);
    }

    #[test]
    fn node_limit_flags_non_optimal() {
        let w: Vec<f64> = (1..=20).map(f64::from).collect();
        let inst = MwisInstance::new(w, vec![], (0..19).map(|i| (i, i + 1)).collect()).unwrap();
        let sel = solve_exact(&inst, 3);
        assert!(!sel.optimal);
        assert!(inst.is_feasible(&sel.chosen));
    }

    #[test]
    fn heuristic_cases() {
        let free = MwisInstance::new(vec![1.0, 2.0, 3.0], vec![], vec![]).unwrap();
        assert_eq!(solve_heuristic(&free).chosen, vec![0, 1, 2]);
        assert!(solve_heuristic(&chain()).value >= 5.0);
        let empty = MwisInstance::new(vec![], vec![], vec![]).unwrap();
        assert!(solve_heuristic(&empty).chosen.is_empty());
    }

    #[test]
    fn penalty_matrix_layout() {
        let free = MwisInstance::new(vec![1.0, 2.0], vec![], vec![]).unwrap();
        let q = build_penalty_matrix(&free).to_dense();
        assert_eq!(q, vec![vec![1.0, 0.0], vec![0.0, 2.0]]);

        let pair = MwisInstance::new(vec![1.0, 2.0], vec![], vec![(0, 1)]).unwrap();
        let p = build_penalty_matrix(&pair);
        assert!(p.d_penalty() > 0.5 * 2.0);
        assert_eq!(p.get(0, 1), -p.d_penalty());
        assert_eq!(p.get(1, 0), -p.d_penalty());

        let group = MwisInstance::new(vec![1.0, 1.0, 1.0], vec![vec![0, 1, 2]], vec![]).unwrap();
        let p = build_penalty_matrix(&group);
        for (s, t) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(p.get(s, t), -p.d_penalty());
        }
    }

    #[test]
    fn invalid_instances() {
        assert!(MwisInstance::new(vec![0.0], vec![], vec![]).is_err());
        assert!(MwisInstance::new(vec![1.0], vec![vec![0, 3]], vec![]).is_err());
    }

    fn instance() -> impl Strategy<Value = MwisInstance> {
        (1usize..=12).prop_flat_map(|m| {
            (
                prop::collection::vec(0.1f64..10.0, m),
                prop::collection::vec(prop::collection::vec(0..m, 2..4), 0..4),
                prop::collection::vec((0..m, 0..m), 0..2 * m),
            )
                .prop_map(|(w, g, p)| MwisInstance::new(w, g, p).unwrap())
        })
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(inst in instance()) {
            let sel = solve_exact(&inst, u64::MAX);
            prop_assert!(sel.optimal);
            prop_assert!(inst.is_feasible(&sel.chosen));
            prop_assert!((sel.value - enumerate(&inst)).abs() < 1e-9);
        }

        #[test]
        fn heuristic_is_feasible_and_maximal(inst in instance()) {
            let sel = solve_heuristic(&inst);
            prop_assert!(inst.is_feasible(&sel.chosen));
            let best_single = inst.weights().iter().copied().fold(0.0, f64::max);
            prop_assert!(sel.value >= best_single - 1e-12);
            for s in 0..inst.len() {
                if !sel.chosen.contains(&s) {
                    let mut more = sel.chosen.clone();
                    more.push(s);
                    prop_assert!(!inst.is_feasible(&more));
                }
            }
        }
    }
}

//! Kempe chains and swap moves.
//!
//! A Kempe chain for clusters `(i, j)` is a connected component of the
//! subgraph induced by the super-nodes colored `i` or `j`. Exchanging the two
//! colors on one chain keeps the coloring proper. When `j` is empty, every
//! node of `i` is its own chain, which lets swaps repopulate empty clusters.
//!
//! Several chains can be swapped in one round as long as they share no node
//! and their joint application leaves no cannot-link edge monochromatic;
//! the best compatible subset is picked by [`crate::mwis`].

use std::collections::{BTreeMap, BTreeSet};

use crate::constraints::{validate_assignment, SuperNodeGraph};
use crate::data::dot;
use crate::error::{Error, Result};
use crate::model::{Assignment, Centroids, Problem};
use crate::mwis::{self, MwisInstance};

/// Knobs shared by every Kempe-swap round.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapSettings {
    /// Candidate sets up to this size go to exact branch-and-bound.
    pub exact_limit: usize,
    pub node_limit: u64,
    /// Rotations examine all cluster triples while `k` is at most this.
    pub full_triples_max_k: usize,
    /// Safety cap on rounds when iterating swaps to a fixed point.
    pub max_rounds: usize,
}

impl Default for SwapSettings {
    fn default() -> Self {
        Self { exact_limit: 40, node_limit: 200_000, full_triples_max_k: 20, max_rounds: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KempeChain {
    pub cluster_pair: (usize, usize),
    /// Chain nodes currently in the first cluster of the pair, ascending.
    pub nodes_i: Vec<usize>,
    /// Chain nodes currently in the second cluster of the pair, ascending.
    pub nodes_j: Vec<usize>,
    pub weight_i: f64,
    pub weight_j: f64,
    pub sum_i: Vec<f64>,
    pub sum_j: Vec<f64>,
}

impl KempeChain {
    fn from_nodes(problem: &Problem, pair: (usize, usize), mut nodes_i: Vec<usize>, mut nodes_j: Vec<usize>) -> Self {
        nodes_i.sort_unstable();
        nodes_j.sort_unstable();
        let stats = problem.stats();
        let dim = problem.dim();
        let agg = |nodes: &[usize]| {
            let mut sum = vec![0.0; dim];
            let mut w = 0.0;
            for &v in nodes {
                w += stats.weight(v);
                sum.iter_mut().zip(stats.sum(v)).for_each(|(s, x)| *s += x);
            }
            (w, sum)
        };
        let (weight_i, sum_i) = agg(&nodes_i);
        let (weight_j, sum_j) = agg(&nodes_j);
        Self { cluster_pair: pair, nodes_i, nodes_j, weight_i, weight_j, sum_i, sum_j }
    }

    pub fn len(&self) -> usize {
        self.nodes_i.len() + self.nodes_j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes_i.iter().chain(&self.nodes_j).copied()
    }

    /// `(node, color after the swap)` for every chain node.
    pub fn moves(&self) -> Vec<(usize, usize)> {
        let (i, j) = self.cluster_pair;
        let mut out: Vec<_> = self.nodes_i.iter().map(|&v| (v, j)).chain(self.nodes_j.iter().map(|&v| (v, i))).collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapCandidate {
    pub id: usize,
    pub chain: KempeChain,
    /// Change in fixed-centroid inertia if this chain alone is swapped.
    pub cost: f64,
}

/// Which part of the graph a round may touch.
#[derive(Debug, Clone, Copy, Default)]
pub struct Scope<'a> {
    pub nodes: Option<&'a [bool]>,
    pub clusters: Option<&'a [usize]>,
}

impl Scope<'_> {
    #[inline]
    fn has_node(&self, v: usize) -> bool {
        self.nodes.is_none_or(|m| m[v])
    }
}

/// Reusable BFS buffers for chain enumeration.
struct ChainFinder {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<usize>,
}

impl ChainFinder {
    fn new(n: usize) -> Self {
        Self { stamp: vec![0; n], epoch: 0, queue: Vec::new() }
    }

    fn chains(
        &mut self,
        problem: &Problem,
        u: &Assignment,
        clusters: &[Vec<usize>],
        (i, j): (usize, usize),
        scope: Scope<'_>,
    ) -> Vec<KempeChain> {
        let ci: Vec<usize> = clusters[i].iter().copied().filter(|&v| scope.has_node(v)).collect();
        let cj: Vec<usize> = clusters[j].iter().copied().filter(|&v| scope.has_node(v)).collect();
        if cj.is_empty() || ci.is_empty() {
            // empty partner: each node forms its own chain
            let (side_i, single) = if cj.is_empty() { (true, ci) } else { (false, cj) };
            return single
                .into_iter()
                .map(|v| {
                    let (a, b) = if side_i { (vec![v], vec![]) } else { (vec![], vec![v]) };
                    KempeChain::from_nodes(problem, (i, j), a, b)
                })
                .collect();
        }
        let g = problem.graph();
        self.epoch += 1;
        let epoch = self.epoch;
        let mut out = Vec::new();
        for &start in ci.iter().chain(&cj) {
            if self.stamp[start] == epoch {
                continue;
            }
            self.stamp[start] = epoch;
            self.queue.clear();
            self.queue.push(start);
            let (mut ni, mut nj) = (Vec::new(), Vec::new());
            while let Some(v) = self.queue.pop() {
                if u.cluster_of(v) == i {
                    ni.push(v);
                } else {
                    nj.push(v);
                }
                for &w in g.neighbors(v) {
                    let cw = u.cluster_of(w);
                    if self.stamp[w] != epoch && (cw == i || cw == j) && scope.has_node(w) {
                        self.stamp[w] = epoch;
                        self.queue.push(w);
                    }
                }
            }
            out.push(KempeChain::from_nodes(problem, (i, j), ni, nj));
        }
        out
    }
}

/// All Kempe chains between clusters `i` and `j` under `u`.
pub fn kempe_chains(problem: &Problem, u: &Assignment, i: usize, j: usize) -> Vec<KempeChain> {
    assert_ne!(i, j, "a Kempe chain needs two distinct clusters");
    let clusters = u.clusters();
    ChainFinder::new(problem.n_nodes()).chains(problem, u, &clusters, (i, j), Scope::default())
}

/// Closed-form swap cost and the magnitude of its two terms (for roundoff
/// thresholds).
fn swap_cost_parts(chain: &KempeChain, mu: &Centroids) -> (f64, f64) {
    let (i, j) = chain.cluster_pair;
    let (mi, mj) = (mu.get(i), mu.get(j));
    let norm_term = (chain.weight_i - chain.weight_j) * (mu.sq_norm(j) - mu.sq_norm(i));
    let diff: Vec<f64> = mj.iter().zip(mi).map(|(a, b)| a - b).collect();
    let cross = 2.0 * (dot(&chain.sum_i, &diff) - dot(&chain.sum_j, &diff));
    (norm_term - cross, norm_term.abs() + cross.abs())
}

/// Inertia change at fixed centroids caused by swapping `chain`:
/// `(|H_i| − |H_j|)(||μ_j||² − ||μ_i||²) − 2(s_i − s_j)ᵀ(μ_j − μ_i)` where
/// `s` are the member sums of each side.
pub fn swap_cost(chain: &KempeChain, mu: &Centroids) -> f64 {
    swap_cost_parts(chain, mu).0
}

const ROUNDOFF: f64 = 1e-12;

/// Every chain with a strictly negative swap cost, over all cluster pairs in scope.
pub fn improving_candidates(problem: &Problem, u: &Assignment, mu: &Centroids, scope: Scope<'_>) -> Vec<SwapCandidate> {
    let clusters = u.clusters();
    let all: Vec<usize>;
    let cluster_list = match scope.clusters {
        Some(c) => c,
        None => {
            all = (0..u.k()).collect();
            &all
        }
    };
    let mut finder = ChainFinder::new(problem.n_nodes());
    let mut out = Vec::new();
    for (a, &i) in cluster_list.iter().enumerate() {
        for &j in &cluster_list[a + 1..] {
            for chain in finder.chains(problem, u, &clusters, (i, j), scope) {
                let (cost, scale) = swap_cost_parts(&chain, mu);
                if cost < -ROUNDOFF * scale.max(f64::MIN_POSITIVE) {
                    out.push(SwapCandidate { id: out.len(), chain, cost });
                }
            }
        }
    }
    out
}

/// Compatibility structure among candidate swaps.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapConflictGraph {
    pub candidates: Vec<SwapCandidate>,
    /// Candidate ids touching each super-node (only nodes in some candidate).
    pub clique_groups: BTreeMap<usize, Vec<usize>>,
    /// Pairs `(s, t)`, `s < t`, whose joint application breaks a cannot-link edge.
    pub cl_pairs: Vec<(usize, usize)>,
}

impl SwapConflictGraph {
    pub fn to_mwis(&self) -> MwisInstance {
        conflict_instance(self.candidates.iter().map(|c| -c.cost).collect(), &self.clique_groups, &self.cl_pairs)
    }

    /// True iff `(s, t)` appear together in some clique group or in `cl_pairs`.
    pub fn conflicting(&self, s: usize, t: usize) -> bool {
        let key = (s.min(t), s.max(t));
        self.cl_pairs.binary_search(&key).is_ok() || self.clique_groups.values().any(|g| g.contains(&s) && g.contains(&t))
    }
}

fn conflict_instance(weights: Vec<f64>, groups: &BTreeMap<usize, Vec<usize>>, pairs: &[(usize, usize)]) -> MwisInstance {
    let groups = groups.values().filter(|g| g.len() > 1).cloned().collect();
    MwisInstance::new(weights, groups, pairs.to_vec()).expect("candidate weights are positive and ids valid")
}

/// Clique groups and cannot-link pairs for arbitrary multi-node moves.
///
/// `moves[s]` lists `(node, color after s)` sorted by node. Two moves clash
/// on an edge `(a, b)` when `a` is in one, `b` in the other and both end up
/// with the same color. Each single move is assumed proper on its own, so
/// edges to nodes outside both moves never need checking.
fn move_conflicts(moves: &[Vec<(usize, usize)>], g: &SuperNodeGraph) -> (BTreeMap<usize, Vec<usize>>, Vec<(usize, usize)>) {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, mv) in moves.iter().enumerate() {
        for &(v, _) in mv {
            groups.entry(v).or_default().push(s);
        }
    }
    let color_under = |t: usize, v: usize| moves[t].binary_search_by_key(&v, |&(n, _)| n).ok().map(|p| moves[t][p].1);
    let shares_node = |s: usize, t: usize| {
        let (a, b) = if moves[s].len() <= moves[t].len() { (s, t) } else { (t, s) };
        moves[a].iter().any(|&(v, _)| color_under(b, v).is_some())
    };
    let mut pairs = BTreeSet::new();
    for (s, mv) in moves.iter().enumerate() {
        for &(a, ca) in mv {
            for &b in g.neighbors(a) {
                let Some(ts) = groups.get(&b) else { continue };
                for &t in ts {
                    if t == s || color_under(t, b) != Some(ca) {
                        continue;
                    }
                    let key = (s.min(t), s.max(t));
                    if !pairs.contains(&key) && !shares_node(s, t) {
                        pairs.insert(key);
                    }
                }
            }
        }
    }
    (groups, pairs.into_iter().collect())
}

/// Builds the conflict structure for candidates generated under `u`.
pub fn build_conflicts(candidates: Vec<SwapCandidate>, g: &SuperNodeGraph, u: &Assignment) -> SwapConflictGraph {
    debug_assert!(candidates.iter().all(|c| c.chain.nodes_i.iter().all(|&v| u.cluster_of(v) == c.chain.cluster_pair.0)));
    let moves: Vec<_> = candidates.iter().map(|c| c.chain.moves()).collect();
    let (clique_groups, cl_pairs) = move_conflicts(&moves, g);
    SwapConflictGraph { candidates, clique_groups, cl_pairs }
}

fn apply_moves<'a>(g: &SuperNodeGraph, u: &Assignment, moves: impl IntoIterator<Item = &'a [(usize, usize)]>) -> Result<Assignment> {
    let mut out = u.clone();
    let mut touched = vec![false; u.len()];
    for mv in moves {
        for &(v, c) in mv {
            if touched[v] {
                return Err(Error::ConflictingSelection);
            }
            touched[v] = true;
            out.set(v, c);
        }
    }
    if !validate_assignment(g, out.as_slice()) {
        return Err(Error::ConflictingSelection);
    }
    Ok(out)
}

/// Swaps every chosen chain. Fails with [`Error::ConflictingSelection`] if
/// two chains share a node or the result is not a proper coloring.
pub fn apply_swaps(g: &SuperNodeGraph, u: &Assignment, chosen: &[&SwapCandidate]) -> Result<Assignment> {
    let moves: Vec<_> = chosen.iter().map(|c| c.chain.moves()).collect();
    apply_moves(g, u, moves.iter().map(Vec::as_slice))
}

/// Result of one Kempe-swap round.
#[derive(Debug, Clone)]
pub struct RoundOutcome {
    pub assignment: Assignment,
    pub candidates: usize,
    pub applied: usize,
    /// Inertia decrease at fixed centroids (sum of chosen weights).
    pub improvement: f64,
}

/// One round: collect improving chains, resolve conflicts, apply the chosen set.
pub fn swap_round(problem: &Problem, u: &Assignment, mu: &Centroids, settings: &SwapSettings, scope: Scope<'_>) -> RoundOutcome {
    let candidates = improving_candidates(problem, u, mu, scope);
    if candidates.is_empty() {
        return RoundOutcome { assignment: u.clone(), candidates: 0, applied: 0, improvement: 0.0 };
    }
    let n_candidates = candidates.len();
    let conflicts = build_conflicts(candidates, problem.graph(), u);
    let selection = mwis::select(&conflicts.to_mwis(), settings.exact_limit, settings.node_limit);
    let chosen: Vec<&SwapCandidate> = selection.chosen.iter().map(|&s| &conflicts.candidates[s]).collect();
    let assignment = apply_swaps(problem.graph(), u, &chosen).expect("an independent set of swaps stays proper");
    RoundOutcome { assignment, candidates: n_candidates, applied: chosen.len(), improvement: selection.value }
}

/// Repeats [`swap_round`] until no improving chain remains.
pub fn swap_to_fixed_point(problem: &Problem, u: &Assignment, mu: &Centroids, settings: &SwapSettings, scope: Scope<'_>) -> Assignment {
    let mut cur = u.clone();
    for _ in 0..settings.max_rounds {
        let round = swap_round(problem, &cur, mu, settings, scope);
        if round.applied == 0 {
            break;
        }
        cur = round.assignment;
    }
    cur
}

fn cluster_triples(mu: &Centroids, settings: &SwapSettings) -> Vec<[usize; 3]> {
    let k = mu.k();
    let mut out = BTreeSet::new();
    if k <= settings.full_triples_max_k {
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    out.insert([a, b, c]);
                }
            }
        }
    } else {
        for c in 0..k {
            let mut others: Vec<usize> = (0..k).filter(|&o| o != c).collect();
            others.sort_by(|&a, &b| {
                let da = crate::data::squared_distance(mu.get(c), mu.get(a));
                let db = crate::data::squared_distance(mu.get(c), mu.get(b));
                da.total_cmp(&db).then(a.cmp(&b))
            });
            let near = &others[..3.min(others.len())];
            for x in 0..near.len() {
                for y in x + 1..near.len() {
                    let mut t = [c, near[x], near[y]];
                    t.sort_unstable();
                    out.insert(t);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Connected components of the subgraph induced by the three clusters.
fn triple_components(g: &SuperNodeGraph, u: &Assignment, clusters: &[Vec<usize>], triple: [usize; 3]) -> Vec<Vec<usize>> {
    let in_triple = |v: usize| triple.contains(&u.cluster_of(v));
    let mut seen = BTreeSet::new();
    let mut comps = Vec::new();
    for &c in &triple {
        for &s in &clusters[c] {
            if !seen.insert(s) {
                continue;
            }
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in g.neighbors(v) {
                    if in_triple(w) && seen.insert(w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
    }
    comps
}

/// Three-cluster rotations, each refined by restricted Kempe swaps; the
/// improving ones are combined through the same conflict model as pairwise
/// swaps. Returns `u` unchanged when `k < 3` or nothing improves.
pub fn multi_kempe_assignment(problem: &Problem, u: &Assignment, mu: &Centroids, settings: &SwapSettings) -> Assignment {
    let k = u.k();
    if k < 3 {
        return u.clone();
    }
    let g = problem.graph();
    let clusters = u.clusters();
    let mut mask = vec![false; u.len()];
    let mut moves: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut gains = Vec::new();
    for triple in cluster_triples(mu, settings) {
        let [i, j, l] = triple;
        for comp in triple_components(g, u, &clusters, triple) {
            if comp.len() < 2 {
                continue;
            }
            comp.iter().for_each(|&v| mask[v] = true);
            let scope = Scope { nodes: Some(&mask), clusters: Some(&triple) };
            let before: f64 = comp.iter().map(|&v| problem.node_cost(v, mu.get(u.cluster_of(v)))).sum();
            let mut best: Option<(f64, Assignment)> = None;
            for rotation in [[(i, l), (j, i), (l, j)], [(i, j), (j, l), (l, i)]] {
                let mut local = u.clone();
                for &v in &comp {
                    let from = u.cluster_of(v);
                    let to = rotation.iter().find(|(f, _)| *f == from).map(|&(_, t)| t).expect("node in triple");
                    local.set(v, to);
                }
                let local = swap_to_fixed_point(problem, &local, mu, settings, scope);
                let after: f64 = comp.iter().map(|&v| problem.node_cost(v, mu.get(local.cluster_of(v)))).sum();
                if best.as_ref().is_none_or(|(b, _)| after < *b) {
                    best = Some((after, local));
                }
            }
            comp.iter().for_each(|&v| mask[v] = false);
            let (after, local) = best.expect("two rotations evaluated");
            let gain = before - after;
            if gain > ROUNDOFF * before.max(f64::MIN_POSITIVE) {
                moves.push(comp.iter().map(|&v| (v, local.cluster_of(v))).collect());
                gains.push(gain);
            }
        }
    }
    if moves.is_empty() {
        return u.clone();
    }
    let (groups, pairs) = move_conflicts(&moves, g);
    let inst = conflict_instance(gains, &groups, &pairs);
    let selection = mwis::select(&inst, settings.exact_limit, settings.node_limit);
    apply_moves(g, u, selection.chosen.iter().map(|&s| moves[s].as_slice())).expect("independent rotations stay proper")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ConstraintSet;
    use crate::data::{squared_distance, Dataset};
    use proptest::prelude::*;

    fn line_problem(points: &[f64], cl: &[(usize, usize)]) -> Problem {
        let data = Dataset::from_flat("t", points.len(), 1, points.to_vec(), None).unwrap();
        Problem::new(data, ConstraintSet::new([], cl.iter().copied()).unwrap()).unwrap()
    }

    /// Brute-force inertia of a per-node coloring at fixed centroids.
    fn brute_inertia(p: &Problem, colors: &[usize], mu: &Centroids) -> f64 {
        (0..p.data().len()).map(|i| squared_distance(p.data().row(i), mu.get(colors[p.node_of(i)]))).sum()
    }

    // L1..L6 -> nodes 0..5 in C_i = 0, R1..R4 -> nodes 6..9 in C_j = 1
    fn figure_one() -> (Problem, Assignment) {
        let edges = [(0, 6), (0, 8), (1, 7), (1, 8), (4, 9), (5, 9), (3, 9)];
        let p = line_problem(&[0.0; 10], &edges);
        let u = Assignment::new(vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1], 2).unwrap();
        (p, u)
    }

    #[test]
    fn figure_one_chains() {
        let (p, u) = figure_one();
        let mut chains: Vec<Vec<usize>> = kempe_chains(&p, &u, 0, 1).iter().map(|c| c.nodes().collect()).collect();
        chains.iter_mut().for_each(|c| c.sort());
        chains.sort();
        assert_eq!(chains, vec![vec![0, 1, 6, 7, 8], vec![2], vec![3, 4, 5, 9]]);
    }

    #[test]
    fn empty_partner_gives_singletons() {
        let p = line_problem(&[0.0, 1.0], &[]);
        let u = Assignment::new(vec![0, 0], 2).unwrap();
        let chains = kempe_chains(&p, &u, 0, 1);
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].nodes_i, vec![0]);
        assert!(chains[0].nodes_j.is_empty());
        assert_eq!(chains[1].nodes_i, vec![1]);
    }

    #[test]
    fn no_cross_edges_gives_singletons() {
        let p = line_problem(&[0.0, 1.0, 2.0], &[]);
        let u = Assignment::new(vec![0, 1, 0], 2).unwrap();
        assert_eq!(kempe_chains(&p, &u, 0, 1).len(), 3);
    }

    #[test]
    fn swap_cost_examples() {
        let p = line_problem(&[0.0, 10.0], &[(0, 1)]);
        let u = Assignment::new(vec![0, 1], 2).unwrap();
        let chain = &kempe_chains(&p, &u, 0, 1)[0];
        let mu = Centroids::new(2, 1, vec![9.0, 1.0]).unwrap();
        assert!((swap_cost(chain, &mu) + 160.0).abs() < 1e-12);
        let mu = Centroids::new(2, 1, vec![1.0, 9.0]).unwrap();
        assert!((swap_cost(chain, &mu) - 160.0).abs() < 1e-12);
        let same = Centroids::new(2, 1, vec![4.0, 4.0]).unwrap();
        assert_eq!(swap_cost(chain, &same), 0.0);
    }

    #[test]
    fn shared_node_lands_in_one_group() {
        let p = line_problem(&[0.0, 5.0, 10.0], &[]);
        let u = Assignment::new(vec![0, 1, 2], 3).unwrap();
        let mu = Centroids::new(3, 1, vec![10.0, 0.0, 5.0]).unwrap();
        let cands = improving_candidates(&p, &u, &mu, Scope::default());
        let conf = build_conflicts(cands, p.graph(), &u);
        let group = &conf.clique_groups[&0];
        assert!(group.len() >= 2);
        assert!(conf.conflicting(group[0], group[1]));
    }

    #[test]
    fn disjoint_pairs_have_no_cl_pairs() {
        let p = line_problem(&[0.0, 10.0, 20.0, 30.0], &[]);
        let u = Assignment::new(vec![0, 1, 2, 3], 4).unwrap();
        let mu = Centroids::new(4, 1, vec![10.0, 0.0, 30.0, 20.0]).unwrap();
        let cands: Vec<_> = improving_candidates(&p, &u, &mu, Scope { nodes: None, clusters: Some(&[0, 1]) })
            .into_iter()
            .chain(improving_candidates(&p, &u, &mu, Scope { nodes: None, clusters: Some(&[2, 3]) }))
            .enumerate()
            .map(|(id, mut c)| {
                c.id = id;
                c
            })
            .collect();
        let conf = build_conflicts(cands, p.graph(), &u);
        assert!(conf.cl_pairs.is_empty());
    }

    #[test]
    fn joint_application_conflict_is_detected() {
        // edge (0, 1); node 0 in C0 and node 1 in C1 can each move into the
        // empty C2 on their own, but not together
        let p = line_problem(&[0.0, 1.0, 2.0, 3.0], &[(0, 1)]);
        let u = Assignment::new(vec![0, 1, 3, 3], 4).unwrap();
        let mu = Centroids::new(4, 1, vec![100.0, 100.0, 0.5, 3.0]).unwrap();
        let cands = improving_candidates(&p, &u, &mu, Scope::default());
        let s = cands.iter().find(|c| c.chain.cluster_pair == (0, 2) && c.chain.nodes_i == vec![0]).unwrap().id;
        let t = cands.iter().find(|c| c.chain.cluster_pair == (1, 2) && c.chain.nodes_i == vec![1]).unwrap().id;
        let both: Vec<SwapCandidate> = cands.clone();
        let conf = build_conflicts(both, p.graph(), &u);
        assert!(conf.cl_pairs.contains(&(s.min(t), s.max(t))));
        let joint = apply_moves(p.graph(), &u, [cands[s].chain.moves().as_slice(), cands[t].chain.moves().as_slice()]);
        assert!(matches!(joint, Err(Error::ConflictingSelection)));
    }

    #[test]
    fn figure_one_swap_stays_proper() {
        let (p, u) = figure_one();
        for chain in kempe_chains(&p, &u, 0, 1) {
            let cand = SwapCandidate { id: 0, chain, cost: -1.0 };
            let out = apply_swaps(p.graph(), &u, &[&cand]).unwrap();
            assert!(out.is_proper(p.graph()));
        }
        assert_eq!(apply_swaps(p.graph(), &u, &[]).unwrap(), u);
    }

    #[test]
    fn compatible_swaps_add_up() {
        let p = line_problem(&[0.0, 10.0, 20.0, 30.0], &[]);
        let u = Assignment::new(vec![0, 1, 0, 1], 2).unwrap();
        let mu = Centroids::new(2, 1, vec![12.0, 18.0]).unwrap();
        let chains = kempe_chains(&p, &u, 0, 1);
        let a = SwapCandidate { id: 0, cost: swap_cost(&chains[0], &mu), chain: chains[0].clone() };
        let b = SwapCandidate { id: 1, cost: swap_cost(&chains[3], &mu), chain: chains[3].clone() };
        let out = apply_swaps(p.graph(), &u, &[&a, &b]).unwrap();
        let delta = brute_inertia(&p, out.as_slice(), &mu) - brute_inertia(&p, u.as_slice(), &mu);
        assert!((delta - (a.cost + b.cost)).abs() < 1e-9);
    }

    #[test]
    fn overlapping_selection_is_rejected() {
        let p = line_problem(&[0.0, 1.0], &[]);
        let u = Assignment::new(vec![0, 0], 3).unwrap();
        let c1 = SwapCandidate { id: 0, cost: -1.0, chain: kempe_chains(&p, &u, 0, 1)[0].clone() };
        let c2 = SwapCandidate { id: 1, cost: -1.0, chain: kempe_chains(&p, &u, 0, 2)[0].clone() };
        assert!(matches!(apply_swaps(p.graph(), &u, &[&c1, &c2]), Err(Error::ConflictingSelection)));
    }

    #[test]
    fn rotation_on_three_singletons() {
        // points 0, 1, 2 in clusters 0, 1, 2 with centroids (2, 0, 1):
        // optimum at fixed centroids puts 0 -> c1, 1 -> c2, 2 -> c0.
        let p = line_problem(&[0.0, 1.0, 2.0], &[(0, 1), (1, 2), (0, 2)]);
        let u = Assignment::new(vec![0, 1, 2], 3).unwrap();
        let mu = Centroids::new(3, 1, vec![2.0, 0.0, 1.0]).unwrap();
        // oracle: enumerate all 3^3 colorings
        let mut best = f64::INFINITY;
        for code in 0..27 {
            let colors = [code % 3, (code / 3) % 3, code / 9];
            if validate_assignment(p.graph(), &colors) {
                best = best.min(brute_inertia(&p, &colors, &mu));
            }
        }
        let out = multi_kempe_assignment(&p, &u, &mu, &SwapSettings::default());
        assert!(out.is_proper(p.graph()));
        assert_eq!(out.as_slice(), &[1, 2, 0]);
        assert!((brute_inertia(&p, out.as_slice(), &mu) - best).abs() < 1e-12);
        assert!(brute_inertia(&p, out.as_slice(), &mu) < brute_inertia(&p, u.as_slice(), &mu));
    }

    #[test]
    fn rotation_needs_three_clusters() {
        let p = line_problem(&[0.0, 1.0], &[(0, 1)]);
        let u = Assignment::new(vec![0, 1], 2).unwrap();
        let mu = Centroids::new(2, 1, vec![1.0, 0.0]).unwrap();
        assert_eq!(multi_kempe_assignment(&p, &u, &mu, &SwapSettings::default()), u);
    }

    /// Random weighted instance: ML pairs merge points, CL edges over a
    /// greedy proper coloring.
    fn random_instance() -> impl Strategy<Value = (Problem, Assignment, Centroids)> {
        (4usize..20, 1usize..4, 2usize..5).prop_flat_map(|(n, p, k)| {
            (
                Just((n, p, k)),
                prop::collection::vec(-10.0f64..10.0, n * p),
                prop::collection::vec((0..n, 0..n), 0..n / 2),
                prop::collection::vec((0..n, 0..n), 0..2 * n),
                prop::collection::vec(-10.0f64..10.0, k * p),
                prop::collection::vec(0..k, n),
            )
        })
        .prop_filter_map("need a proper coloring", |((n, p, k), pts, ml, cl, mus, colors)| {
            let data = Dataset::from_flat("r", n, p, pts, None).unwrap();
            let ml: Vec<_> = ml.into_iter().filter(|(a, b)| a != b).collect();
            let tmp = crate::constraints::preprocess(&ConstraintSet::new(ml.clone(), []).unwrap(), n).unwrap();
            let node = tmp.node_of_points();
            // keep only CL pairs whose nodes got different random colors
            let cl: Vec<_> = cl.into_iter().filter(|&(a, b)| node[a] != node[b] && colors[node[a]] != colors[node[b]]).collect();
            let problem = Problem::new(data, ConstraintSet::new(ml, cl).unwrap()).ok()?;
            let u = Assignment::new((0..problem.n_nodes()).map(|v| colors[v]).collect(), k).ok()?;
            let mu = Centroids::new(k, p, mus).ok()?;
            Some((problem, u, mu))
        })
    }

    proptest! {
        #[test]
        fn chain_swap_preserves_properness((p, u, _mu) in random_instance(), a in 0usize..5, b in 0usize..5) {
            prop_assume!(u.is_proper(p.graph()));
            let (i, j) = (a % u.k(), b % u.k());
            prop_assume!(i != j);
            for chain in kempe_chains(&p, &u, i, j) {
                let cand = SwapCandidate { id: 0, cost: 0.0, chain };
                let out = apply_swaps(p.graph(), &u, &[&cand]).unwrap();
                prop_assert!(out.is_proper(p.graph()));
            }
        }

        #[test]
        fn swap_cost_is_inertia_delta((p, u, mu) in random_instance(), a in 0usize..5, b in 0usize..5) {
            let (i, j) = (a % u.k(), b % u.k());
            prop_assume!(i != j);
            let before = brute_inertia(&p, u.as_slice(), &mu);
            for chain in kempe_chains(&p, &u, i, j) {
                let mut colors = u.as_slice().to_vec();
                for (v, c) in chain.moves() {
                    colors[v] = c;
                }
                let delta = brute_inertia(&p, &colors, &mu) - before;
                let d = swap_cost(&chain, &mu);
                prop_assert!((d - delta).abs() <= 1e-9 * delta.abs().max(1.0), "{} vs {}", d, delta);
            }
        }

        #[test]
        fn chains_partition_induced_subgraph((p, u, _mu) in random_instance(), a in 0usize..5, b in 0usize..5) {
            let (i, j) = (a % u.k(), b % u.k());
            prop_assume!(i != j);
            let chains = kempe_chains(&p, &u, i, j);
            let mut seen: Vec<usize> = chains.iter().flat_map(|c| c.nodes()).collect();
            seen.sort();
            let expected: Vec<usize> = (0..u.len()).filter(|&v| u.cluster_of(v) == i || u.cluster_of(v) == j).collect();
            prop_assert_eq!(&seen, &expected);
            let both_nonempty = chains.iter().any(|c| !c.nodes_i.is_empty()) && chains.iter().any(|c| !c.nodes_j.is_empty());
            if both_nonempty {
                // maximality: no edge joins two different chains
                let mut chain_of = vec![usize::MAX; u.len()];
                for (id, c) in chains.iter().enumerate() {
                    c.nodes().for_each(|v| chain_of[v] = id);
                }
                for &(x, y) in p.graph().edges() {
                    if chain_of[x] != usize::MAX && chain_of[y] != usize::MAX {
                        prop_assert_eq!(chain_of[x], chain_of[y]);
                    }
                }
            }
        }

        #[test]
        fn rounds_never_increase_inertia((p, u, mu) in random_instance()) {
            prop_assume!(u.is_proper(p.graph()));
            let before = p.inertia_at(&u, &mu);
            let round = swap_round(&p, &u, &mu, &SwapSettings::default(), Scope::default());
            prop_assert!(round.assignment.is_proper(p.graph()));
            let after = p.inertia_at(&round.assignment, &mu);
            prop_assert!((before - after - round.improvement).abs() <= 1e-9 * before.max(1.0));
            let rotated = multi_kempe_assignment(&p, &round.assignment, &mu, &SwapSettings::default());
            prop_assert!(rotated.is_proper(p.graph()));
            prop_assert!(p.inertia_at(&rotated, &mu) <= after + 1e-9 * after.max(1.0));
        }
    }
}

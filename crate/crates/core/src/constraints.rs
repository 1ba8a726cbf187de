//! Pairwise constraints and the super-node graph.
//!
//! Must-link pairs are closed transitively with a union-find; each resulting
//! equivalence class becomes one super-node. Cannot-link pairs are lifted to
//! edges between super-nodes, so a feasible clustering is exactly a proper
//! coloring of the resulting graph.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Canonical must-link and cannot-link pairs over `0..n`.
///
/// Pairs are stored as `(i, j)` with `i < j`, sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    ml: Vec<(usize, usize)>,
    cl: Vec<(usize, usize)>,
}

fn canonical(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, j) in pairs {
        if i == j {
            return Err(Error::SelfConstraint(i));
        }
        out.push((i.min(j), i.max(j)));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl ConstraintSet {
    pub fn new(
        ml: impl IntoIterator<Item = (usize, usize)>,
        cl: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Ok(Self { ml: canonical(ml)?, cl: canonical(cl)? })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn must_link(&self) -> &[(usize, usize)] {
        &self.ml
    }

    pub fn cannot_link(&self) -> &[(usize, usize)] {
        &self.cl
    }

    pub fn len(&self) -> usize {
        self.ml.len() + self.cl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ml.is_empty() && self.cl.is_empty()
    }

    /// Fails with [`Error::IndexOutOfRange`] if any pair references a point `>= n`.
    pub fn check_bounds(&self, n: usize) -> Result<()> {
        for &(_, j) in self.ml.iter().chain(&self.cl) {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
        }
        Ok(())
    }

    /// True iff the per-point labelling honours every pair.
    pub fn is_satisfied_by(&self, labels: &[usize]) -> bool {
        self.ml.iter().all(|&(i, j)| labels[i] == labels[j]) && self.cl.iter().all(|&(i, j)| labels[i] != labels[j])
    }
}

/// Disjoint sets with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Super-nodes (must-link classes) joined by cannot-link edges.
///
/// Super-node ids are ordered by their smallest member index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperNodeGraph {
    members: Vec<Vec<usize>>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl SuperNodeGraph {
    /// Builds a graph directly from member lists and super-node edges.
    pub fn from_parts(members: Vec<Vec<usize>>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let m = members.len();
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::SelfConstraint(a));
            }
            if a.max(b) >= m {
                return Err(Error::IndexOutOfRange { index: a.max(b), n: m });
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); m];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self { members, adjacency, edges: list })
    }

    /// Graph with one super-node per point and the given edges.
    pub fn singletons(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_parts((0..n).map(|i| vec![i]).collect(), edges)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self, v: usize) -> &[usize] {
        &self.members[v]
    }

    pub fn all_members(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// Number of data points aggregated by `v`.
    pub fn weight(&self, v: usize) -> usize {
        self.members[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total number of data points covered.
    pub fn n_points(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// Maps each data point to its super-node.
    pub fn node_of_points(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n_points()];
        for (v, ms) in self.members.iter().enumerate() {
            for &i in ms {
                if i >= out.len() {
                    out.resize(i + 1, usize::MAX);
                }
                out[i] = v;
            }
        }
        out
    }

    /// Expands a super-node coloring to per-point labels.
    pub fn expand(&self, colors: &[usize]) -> Vec<usize> {
        let n = self.members.iter().flatten().max().map_or(0, |m| m + 1);
        let mut out = vec![usize::MAX; n];
        for (v, ms) in self.members.iter().enumerate() {
            for &i in ms {
                out[i] = colors[v];
            }
        }
        out
    }
}

/// Collapses must-link classes and lifts cannot-link pairs onto them.
pub fn preprocess(constraints: &ConstraintSet, n: usize) -> Result<SuperNodeGraph> {
    constraints.check_bounds(n)?;
    let mut uf = UnionFind::new(n);
    for &(i, j) in constraints.must_link() {
        uf.union(i, j);
    }
    let mut id_of_root = vec![usize::MAX; n];
    let mut node_of = vec![0; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = uf.find(i);
        if id_of_root[r] == usize::MAX {
            id_of_root[r] = members.len();
            members.push(Vec::new());
        }
        node_of[i] = id_of_root[r];
        members[id_of_root[r]].push(i);
    }
    let mut edges = Vec::with_capacity(constraints.cannot_link().len());
    for &(i, j) in constraints.cannot_link() {
        let (a, b) = (node_of[i], node_of[j]);
        if a == b {
            return Err(Error::ContradictoryConstraints(i, j));
        }
        edges.push((a, b));
    }
    SuperNodeGraph::from_parts(members, edges)
}

/// A connected piece of a super-node graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Super-node ids in the parent graph, ascending.
    pub nodes: Vec<usize>,
    /// Induced subgraph with local ids; members keep original point indices.
    pub graph: SuperNodeGraph,
}

pub fn connected_components(g: &SuperNodeGraph) -> Vec<Component> {
    let m = g.len();
    let mut comp = vec![usize::MAX; m];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = groups.len();
        comp[s] = c;
        queue.push_back(s);
        let mut nodes = Vec::new();
        while let Some(v) = queue.pop_front() {
            nodes.push(v);
            for &w in g.neighbors(v) {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    queue.push_back(w);
                }
            }
        }
        nodes.sort_unstable();
        groups.push(nodes);
    }
    let mut local = vec![0; m];
    groups
        .into_iter()
        .map(|nodes| {
            for (li, &v) in nodes.iter().enumerate() {
                local[v] = li;
            }
            let members = nodes.iter().map(|&v| g.members(v).to_vec()).collect();
            let edges: Vec<_> = nodes
                .iter()
                .flat_map(|&v| g.neighbors(v).iter().filter(move |&&w| w > v).map(move |&w| (v, w)))
                .map(|(a, b)| (local[a], local[b]))
                .collect();
            let graph = SuperNodeGraph::from_parts(members, edges).expect("induced subgraph is well formed");
            Component { nodes, graph }
        })
        .collect()
}

/// True iff no cannot-link edge joins two super-nodes of the same cluster.
pub fn validate_assignment(g: &SuperNodeGraph, colors: &[usize]) -> bool {
    colors.len() == g.len() && g.edges().iter().all(|&(a, b)| colors[a] != colors[b])
}

/// Parses `ML i j` / `CL i j` lines; `#` starts a comment line.
pub fn parse_constraints(text: &str) -> Result<ConstraintSet> {
    let mut ml = Vec::new();
    let mut cl = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: lineno + 1, msg };
        let mut parts = line.split_whitespace();
        let kind = parts.next().unwrap_or_default();
        let mut idx = || -> Result<usize> {
            let tok = parts.next().ok_or_else(|| parse_err("expected two indices".into()))?;
            tok.parse().map_err(|_| parse_err(format!("invalid index `{tok}`")))
        };
        let (i, j) = (idx()?, idx()?);
        if parts.next().is_some() {
            return Err(parse_err("trailing tokens".into()));
        }
        if i == j {
            return Err(parse_err(format!("constraint pairs point {i} with itself")));
        }
        match kind {
            "ML" | "ml" => ml.push((i, j)),
            "CL" | "cl" => cl.push((i, j)),
            other => return Err(parse_err(format!("unknown constraint kind `{other}`"))),
        }
    }
    ConstraintSet::new(ml, cl)
}

pub fn format_constraints(c: &ConstraintSet) -> String {
    let mut out = String::new();
    for &(i, j) in c.must_link() {
        out.push_str(&format!("ML {i} {j}\n"));
    }
    for &(i, j) in c.cannot_link() {
        out.push_str(&format!("CL {i} {j}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transitive_merge() {
        let c = ConstraintSet::new([(0, 1), (1, 2)], []).unwrap();
        let g = preprocess(&c, 4).unwrap();
        assert_eq!(g.all_members(), &[vec![0, 1, 2], vec![3]]);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn single_lift() {
        let c = ConstraintSet::new([(0, 1)], [(1, 3)]).unwrap();
        let g = preprocess(&c, 4).unwrap();
        assert_eq!(g.all_members(), &[vec![0, 1], vec![2], vec![3]]);
        assert_eq!(g.edges(), &[(0, 2)]);
    }

    #[test]
    fn closure_meets_cannot_link() {
        let c = ConstraintSet::new([(0, 1), (1, 2)], [(0, 2)]).unwrap();
        assert!(matches!(preprocess(&c, 3), Err(Error::ContradictoryConstraints(0, 2))));
    }

    #[test]
    fn out_of_range_index() {
        let c = ConstraintSet::new([(0, 5)], []).unwrap();
        assert!(matches!(preprocess(&c, 3), Err(Error::IndexOutOfRange { index: 5, n: 3 })));
    }

    #[test]
    fn canonical_pairs() {
        let c = ConstraintSet::new([(3, 1), (1, 3), (0, 2)], [(2, 0)]).unwrap();
        assert_eq!(c.must_link(), &[(0, 2), (1, 3)]);
        assert_eq!(c.cannot_link(), &[(0, 2)]);
        assert!(matches!(ConstraintSet::new([(1, 1)], []), Err(Error::SelfConstraint(1))));
    }

    #[test]
    fn components() {
        let g = SuperNodeGraph::singletons(3, []).unwrap();
        assert_eq!(connected_components(&g).len(), 3);

        let path = SuperNodeGraph::singletons(3, [(0, 1), (1, 2)]).unwrap();
        let comps = connected_components(&path);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].graph, path);

        let two = SuperNodeGraph::singletons(4, [(0, 2), (1, 3)]).unwrap();
        let comps = connected_components(&two);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].nodes, vec![0, 2]);
        assert_eq!(comps[1].nodes, vec![1, 3]);
        assert_eq!(comps[1].graph.edges(), &[(0, 1)]);
        assert_eq!(comps[1].graph.members(0), &[1]);
    }

    #[test]
    fn validate() {
        let g = SuperNodeGraph::singletons(2, [(0, 1)]).unwrap();
        assert!(!validate_assignment(&g, &[0, 0]));
        assert!(validate_assignment(&g, &[0, 1]));
        let free = SuperNodeGraph::singletons(3, []).unwrap();
        assert!(validate_assignment(&free, &[0, 0, 0]));
    }

    #[test]
    fn constraint_file_roundtrip() {
        let text = "# header\nML 0 1\n\nCL 2 1\ncl 3 0\n";
        let c = parse_constraints(text).unwrap();
        assert_eq!(c.must_link(), &[(0, 1)]);
        assert_eq!(c.cannot_link(), &[(0, 3), (1, 2)]);
        assert_eq!(parse_constraints(&format_constraints(&c)).unwrap(), c);
    }

    #[test]
    fn constraint_file_errors() {
        assert!(matches!(parse_constraints("ML 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_constraints("# x\nXX 0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_constraints("CL 0 a\n"), Err(Error::Parse { line: 1, .. })));
    }

    fn pairs(n: usize, max: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
        prop::collection::vec((0..n, 0..n), 0..max).prop_map(|v| v.into_iter().filter(|(a, b)| a != b).collect())
    }

    proptest! {
        #[test]
        fn closure_is_order_independent(ml in pairs(20, 30), seed in any::<u64>()) {
            let g1 = preprocess(&ConstraintSet::new(ml.clone(), []).unwrap(), 20).unwrap();
            let mut shuffled: Vec<_> = ml.iter().map(|&(a, b)| if seed % 2 == 0 { (b, a) } else { (a, b) }).collect();
            shuffled.reverse();
            let k = (seed as usize) % (shuffled.len().max(1));
            shuffled.rotate_left(k);
            let g2 = preprocess(&ConstraintSet::new(shuffled, []).unwrap(), 20).unwrap();
            prop_assert_eq!(&g1, &g2);
            prop_assert_eq!(g1.n_points(), 20);
            let sum: usize = (0..g1.len()).map(|v| g1.weight(v)).sum();
            prop_assert_eq!(sum, 20);
            for &(a, b) in &ml {
                let node = g1.node_of_points();
                prop_assert_eq!(node[a], node[b]);
            }
        }

        #[test]
        fn validate_matches_raw_scan(ml in pairs(12, 8), cl in pairs(12, 15), colors in prop::collection::vec(0usize..3, 12)) {
            let c = ConstraintSet::new(ml, cl).unwrap();
            let Ok(g) = preprocess(&c, 12) else { return Ok(()); };
            let node_colors: Vec<usize> = (0..g.len()).map(|v| colors[v]).collect();
            let labels = g.expand(&node_colors);
            let raw = c.cannot_link().iter().all(|&(i, j)| labels[i] != labels[j]);
            prop_assert_eq!(validate_assignment(&g, &node_colors), raw);
            prop_assert!(c.must_link().iter().all(|&(i, j)| labels[i] == labels[j]));
        }
    }
}

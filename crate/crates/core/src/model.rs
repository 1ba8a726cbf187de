//! Assignments, centroids and the preprocessed problem they act on.

use crate::constraints::{preprocess, validate_assignment, ConstraintSet, SuperNodeGraph};
use crate::data::{squared_distance, Dataset};
use crate::error::{Error, Result};

/// Cluster index per super-node, with `k` available clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    cluster_of: Vec<usize>,
    k: usize,
}

impl Assignment {
    pub fn new(cluster_of: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&c) = cluster_of.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidConfig(format!("cluster {c} out of range for k = {k}")));
        }
        Ok(Self { cluster_of, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_of.is_empty()
    }

    #[inline]
    pub fn cluster_of(&self, v: usize) -> usize {
        self.cluster_of[v]
    }

    #[inline]
    pub fn set(&mut self, v: usize, c: usize) {
        debug_assert!(c < self.k);
        self.cluster_of[v] = c;
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.cluster_of
    }

    /// Super-nodes of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.cluster_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn empty_clusters(&self) -> Vec<usize> {
        let mut used = vec![false; self.k];
        for &c in &self.cluster_of {
            used[c] = true;
        }
        (0..self.k).filter(|&c| !used[c]).collect()
    }

    pub fn is_proper(&self, g: &SuperNodeGraph) -> bool {
        validate_assignment(g, &self.cluster_of)
    }
}

/// `k` centroids of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroids {
    k: usize,
    dim: usize,
    values: Vec<f64>,
}

impl Centroids {
    pub fn new(k: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != k * dim {
            return Err(Error::LengthMismatch { left: k * dim, right: values.len() });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("non-finite centroid component".into()));
        }
        Ok(Self { k, dim, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidConfig("centroid rows differ in dimension".into()));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn zeros(k: usize, dim: usize) -> Self {
        Self { k, dim, values: vec![0.0; k * dim] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, c: usize) -> &[f64] {
        &self.values[c * self.dim..(c + 1) * self.dim]
    }

    #[inline]
    pub fn get_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.values[c * self.dim..(c + 1) * self.dim]
    }

    pub fn set(&mut self, c: usize, value: &[f64]) {
        self.get_mut(c).copy_from_slice(value);
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks_exact(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn sq_norm(&self, c: usize) -> f64 {
        self.get(c).iter().map(|x| x * x).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }
}

/// Per-super-node aggregates consumed by swap costs and distances.
#[derive(Debug, Clone)]
pub struct NodeStats {
    dim: usize,
    weight: Vec<f64>,
    sums: Vec<f64>,
    means: Vec<f64>,
    scatter: Vec<f64>,
}

impl NodeStats {
    pub fn new(graph: &SuperNodeGraph, data: &Dataset) -> Self {
        let dim = data.dim();
        let m = graph.len();
        let mut weight = Vec::with_capacity(m);
        let mut sums = vec![0.0; m * dim];
        let mut means = vec![0.0; m * dim];
        let mut scatter = vec![0.0; m];
        for v in 0..m {
            let members = graph.members(v);
            let w = members.len() as f64;
            weight.push(w);
            let sum = &mut sums[v * dim..(v + 1) * dim];
            for &i in members {
                for (s, x) in sum.iter_mut().zip(data.row(i)) {
                    *s += x;
                }
            }
            let mean = &mut means[v * dim..(v + 1) * dim];
            for (mu, s) in mean.iter_mut().zip(sum.iter()) {
                *mu = s / w;
            }
            scatter[v] = members.iter().map(|&i| squared_distance(data.row(i), mean)).sum();
        }
        Self { dim, weight, sums, means, scatter }
    }

    #[inline]
    pub fn weight(&self, v: usize) -> f64 {
        self.weight[v]
    }

    #[inline]
    pub fn sum(&self, v: usize) -> &[f64] {
        &self.sums[v * self.dim..(v + 1) * self.dim]
    }

    #[inline]
    pub fn mean(&self, v: usize) -> &[f64] {
        &self.means[v * self.dim..(v + 1) * self.dim]
    }

    /// Sum of squared distances of the members to their own mean.
    #[inline]
    pub fn scatter(&self, v: usize) -> f64 {
        self.scatter[v]
    }
}

/// A dataset together with its constraint graph.
#[derive(Debug, Clone)]
pub struct Problem {
    data: Dataset,
    constraints: ConstraintSet,
    graph: SuperNodeGraph,
    stats: NodeStats,
    node_of: Vec<usize>,
}

impl Problem {
    pub fn new(data: Dataset, constraints: ConstraintSet) -> Result<Self> {
        let graph = preprocess(&constraints, data.len())?;
        Ok(Self::from_graph(data, constraints, graph))
    }

    /// Uses an already built graph; its members must partition the data indices.
    pub fn from_graph(data: Dataset, constraints: ConstraintSet, graph: SuperNodeGraph) -> Self {
        let stats = NodeStats::new(&graph, &data);
        let node_of = graph.node_of_points();
        Self { data, constraints, graph, stats, node_of }
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn graph(&self) -> &SuperNodeGraph {
        &self.graph
    }

    pub fn stats(&self) -> &NodeStats {
        &self.stats
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.len()
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    /// Super-node holding data point `i`.
    pub fn node_of(&self, i: usize) -> usize {
        self.node_of[i]
    }

    /// `Σ_{y ∈ members(v)} ||y − μ||²`.
    #[inline]
    pub fn node_cost(&self, v: usize, mu: &[f64]) -> f64 {
        self.stats.scatter(v) + self.stats.weight(v) * squared_distance(self.stats.mean(v), mu)
    }

    /// Inertia of `u` at fixed centroids.
    pub fn inertia_at(&self, u: &Assignment, mu: &Centroids) -> f64 {
        (0..self.n_nodes()).map(|v| self.node_cost(v, mu.get(u.cluster_of(v)))).sum()
    }

    /// Cluster means, accumulated over data points in index order.
    ///
    /// Empty clusters take the matching row of `fallback`, or fail with
    /// [`Error::EmptyCluster`] when no fallback is given.
    pub fn centroids_of(&self, u: &Assignment, fallback: Option<&Centroids>) -> Result<Centroids> {
        let (k, dim) = (u.k(), self.dim());
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for i in 0..self.data.len() {
            let c = u.cluster_of(self.node_of[i]);
            counts[c] += 1;
            for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(self.data.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            let row = &mut sums[c * dim..(c + 1) * dim];
            if counts[c] == 0 {
                match fallback {
                    Some(f) => row.copy_from_slice(f.get(c)),
                    None => return Err(Error::EmptyCluster(c)),
                }
            } else {
                let w = counts[c] as f64;
                row.iter_mut().for_each(|s| *s /= w);
            }
        }
        Centroids::new(k, dim, sums)
    }

    /// Inertia summed over data points in index order.
    pub fn point_inertia(&self, u: &Assignment, mu: &Centroids) -> f64 {
        (0..self.data.len()).map(|i| squared_distance(self.data.row(i), mu.get(u.cluster_of(self.node_of[i])))).sum()
    }

    /// Per-point labels of a super-node assignment.
    pub fn expand(&self, u: &Assignment) -> Vec<usize> {
        self.node_of.iter().map(|&v| u.cluster_of(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Dataset {
        Dataset::from_flat("line", points.len(), 1, points.to_vec(), None).unwrap()
    }

    #[test]
    fn node_cost_matches_member_sum() {
        let data = Dataset::from_rows("d", vec![vec![0.0, 1.0], vec![2.0, -1.0], vec![5.0, 5.0]], None).unwrap();
        let c = ConstraintSet::new([(0, 1)], []).unwrap();
        let p = Problem::new(data.clone(), c).unwrap();
        let mu = [1.5, 0.25];
        let direct = squared_distance(data.row(0), &mu) + squared_distance(data.row(1), &mu);
        assert!((p.node_cost(0, &mu) - direct).abs() < 1e-12);
    }

    #[test]
    fn weighted_centroid() {
        let p = Problem::new(line(&[0.0, 2.0, 7.0]), ConstraintSet::new([(0, 1)], []).unwrap()).unwrap();
        let u = Assignment::new(vec![0, 0], 1).unwrap();
        let mu = p.centroids_of(&u, None).unwrap();
        assert_eq!(mu.get(0), &[3.0]);
    }

    #[test]
    fn empty_cluster_needs_fallback() {
        let p = Problem::new(line(&[0.0, 10.0]), ConstraintSet::empty()).unwrap();
        let u = Assignment::new(vec![0, 0], 2).unwrap();
        assert!(matches!(p.centroids_of(&u, None), Err(Error::EmptyCluster(1))));
        let fb = Centroids::new(2, 1, vec![9.0, 4.0]).unwrap();
        let mu = p.centroids_of(&u, Some(&fb)).unwrap();
        assert_eq!(mu.as_flat(), &[5.0, 4.0]);
        assert_eq!(u.empty_clusters(), vec![1]);
    }

    #[test]
    fn inertia_routes_agree() {
        let p = Problem::new(line(&[0.0, 1.0, 4.0, 9.0]), ConstraintSet::new([(2, 3)], []).unwrap()).unwrap();
        let u = Assignment::new(vec![0, 1, 1], 2).unwrap();
        let mu = p.centroids_of(&u, None).unwrap();
        assert!((p.inertia_at(&u, &mu) - p.point_inertia(&u, &mu)).abs() < 1e-12);
    }
}

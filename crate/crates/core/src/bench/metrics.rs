//! Partition agreement and constraint checks on per-point labels.

use std::collections::HashMap;

use crate::constraints::ConstraintSet;
use crate::data::{squared_distance, Dataset};
use crate::error::{Error, Result};

fn pairs(x: u64) -> f64 {
    (x * x.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand Index. Returns 1.0 when both partitions are trivial in the
/// same way (the index is undefined there).
pub fn adjusted_rand_index(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: truth.len() });
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&a, &b) in pred.iter().zip(truth) {
        *table.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(pred.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Outcome of checking a per-point labelling against data and constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub ml_violations: usize,
    pub cl_violations: usize,
    /// Clusters in `0..k` with no point.
    pub empty_clusters: Vec<usize>,
    /// Sum of squared distances to the cluster means.
    pub inertia: f64,
}

impl Verification {
    pub fn is_feasible(&self) -> bool {
        self.ml_violations == 0 && self.cl_violations == 0 && self.empty_clusters.is_empty()
    }
}

/// Recomputes inertia from scratch and counts violated constraints.
/// `k` defaults to one more than the largest label.
pub fn verify_labels(data: &Dataset, constraints: &ConstraintSet, labels: &[usize], k: Option<usize>) -> Result<Verification> {
    if labels.len() != data.len() {
        return Err(Error::LengthMismatch { left: data.len(), right: labels.len() });
    }
    constraints.check_bounds(data.len())?;
    let k = k.unwrap_or_else(|| labels.iter().max().map_or(0, |&m| m + 1));
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::InvalidConfig(format!("label {bad} not below k = {k}")));
    }
    let dim = data.dim();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        sums[c * dim..(c + 1) * dim].iter_mut().zip(data.row(i)).for_each(|(s, x)| *s += x);
    }
    for c in 0..k {
        if counts[c] > 0 {
            sums[c * dim..(c + 1) * dim].iter_mut().for_each(|s| *s /= counts[c] as f64);
        }
    }
    let inertia = labels.iter().enumerate().map(|(i, &c)| squared_distance(data.row(i), &sums[c * dim..(c + 1) * dim])).sum();
    Ok(Verification {
        ml_violations: constraints.must_link().iter().filter(|&&(i, j)| labels[i] != labels[j]).count(),
        cl_violations: constraints.cannot_link().iter().filter(|&&(i, j)| labels[i] == labels[j]).count(),
        empty_clusters: (0..k).filter(|&c| counts[c] == 0).collect(),
        inertia,
    })
}

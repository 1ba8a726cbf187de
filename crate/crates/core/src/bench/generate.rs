//! Synthetic data and label-derived constraints.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::constraints::ConstraintSet;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Constrains `⌊level · n(n−1)/2⌋` distinct pairs drawn uniformly: equal
/// labels give a must-link, different labels a cannot-link.
pub fn generate_constraints<R: Rng + ?Sized>(labels: &[usize], level: f64, rng: &mut R) -> Result<ConstraintSet> {
    if !(level > 0.0 && level <= 1.0) {
        return Err(Error::InvalidConfig(format!("constraint level {level} outside (0, 1]")));
    }
    let n = labels.len();
    let total = n * n.saturating_sub(1) / 2;
    let count = ((level * total as f64).floor() as usize).min(total);
    // first pair index of each row i, pairs (i, j) with j > i
    let offsets: Vec<usize> = (0..n).map(|i| i * (2 * n - i - 1) / 2).collect();
    let mut picks = index::sample(rng, total, count).into_vec();
    picks.sort_unstable();
    let (mut ml, mut cl) = (Vec::new(), Vec::new());
    for t in picks {
        let i = offsets.partition_point(|&o| o <= t) - 1;
        let j = i + 1 + (t - offsets[i]);
        if labels[i] == labels[j] {
            ml.push((i, j));
        } else {
            cl.push((i, j));
        }
    }
    ConstraintSet::new(ml, cl)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobParams {
    pub n: usize,
    pub k: usize,
    pub dim: usize,
    /// Standard deviation of each blob.
    pub spread: f64,
    /// Centres are drawn uniformly from `[-box, box]^dim`.
    pub center_box: f64,
}

impl Default for BlobParams {
    fn default() -> Self {
        Self { n: 300, k: 3, dim: 2, spread: 1.0, center_box: 10.0 }
    }
}

/// Isotropic Gaussian blobs with near-equal sizes; labels are blob ids.
pub fn gaussian_blobs<R: Rng + ?Sized>(name: &str, params: BlobParams, rng: &mut R) -> Result<Dataset> {
    let BlobParams { n, k, dim, spread, center_box } = params;
    if k == 0 || n < k || !(spread >= 0.0) || !(center_box >= 0.0) {
        return Err(Error::InvalidConfig("blobs need n >= k >= 1 and non-negative spread".into()));
    }
    let centers: Vec<f64> = (0..k * dim).map(|_| rng.random_range(-center_box..=center_box)).collect();
    let noise = Normal::new(0.0, spread).expect("spread checked");
    let mut points = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i * k / n;
        labels.push(c);
        for a in 0..dim {
            points.push(centers[c * dim + a] + noise.sample(rng));
        }
    }
    Dataset::from_flat(name, n, dim, points, Some(labels))
}

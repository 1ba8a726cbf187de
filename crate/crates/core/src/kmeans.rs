//! Unconstrained k-means: k-means++ seeding and Lloyd iterations.

use rand::Rng;

use crate::data::{squared_distance, Dataset};
use crate::model::Centroids;

/// D²-weighted seeding. Falls back to uniform picks once every point
/// coincides with a chosen centre.
pub fn kmeans_plus_plus<R: Rng + ?Sized>(data: &Dataset, k: usize, rng: &mut R) -> Centroids {
    let n = data.len();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = (0..n).map(|i| squared_distance(data.row(i), data.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            // roundoff can leave `pick` on a zero-weight point
            if d2[pick] == 0.0 {
                pick = d2.iter().rposition(|&d| d > 0.0).unwrap_or(pick);
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(squared_distance(data.row(i), data.row(next)));
        }
    }
    let values = chosen.iter().flat_map(|&i| data.row(i).iter().copied()).collect();
    Centroids::new(k, data.dim(), values).expect("rows come from the dataset")
}

#[derive(Debug, Clone)]
pub struct LloydResult {
    pub centroids: Centroids,
    pub labels: Vec<usize>,
    pub inertia: f64,
    pub iterations: usize,
}

pub fn nearest(mu: &Centroids, y: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..mu.k() {
        let d = squared_distance(y, mu.get(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd iterations from `init` until labels stop changing. Empty clusters
/// keep their previous centre.
pub fn lloyd(data: &Dataset, init: &Centroids, max_iter: usize) -> LloydResult {
    let (n, dim, k) = (data.len(), data.dim(), init.k());
    let mut mu = init.clone();
    let mut labels = vec![usize::MAX; n];
    let mut iterations = 0;
    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let (c, _) = nearest(&mu, data.row(i));
            if *label != c {
                *label = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(data.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let row: Vec<f64> = sums[c * dim..(c + 1) * dim].iter().map(|s| s / counts[c] as f64).collect();
                mu.set(c, &row);
            }
        }
    }
    let inertia = (0..n).map(|i| squared_distance(data.row(i), mu.get(labels[i]))).sum();
    LloydResult { centroids: mu, labels, inertia, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_blobs_1d() {
        let data = Dataset::from_flat("b", 4, 1, vec![0.0, 0.1, 10.0, 10.1], None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let init = kmeans_plus_plus(&data, 2, &mut rng);
        let res = lloyd(&data, &init, 100);
        let mut cs = res.centroids.as_flat().to_vec();
        cs.sort_by(f64::total_cmp);
        assert!((cs[0] - 0.05).abs() < 1e-12 && (cs[1] - 10.05).abs() < 1e-12);
        assert!((res.inertia - 0.01).abs() < 1e-12);
    }

    #[test]
    fn seeding_is_reproducible() {
        let data = Dataset::from_flat("b", 5, 1, vec![0.0, 1.0, 2.0, 3.0, 4.0], None).unwrap();
        let a = kmeans_plus_plus(&data, 3, &mut ChaCha8Rng::seed_from_u64(9));
        let b = kmeans_plus_plus(&data, 3, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_points_still_seed_k_centres() {
        let data = Dataset::from_flat("b", 3, 1, vec![1.0, 1.0, 1.0], None).unwrap();
        let mu = kmeans_plus_plus(&data, 3, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(mu.k(), 3);
        assert!(mu.as_flat().iter().all(|&x| x == 1.0));
    }
}

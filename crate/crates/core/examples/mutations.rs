//! The two mutation moves on their own: a random centroid perturbation
//! and a shift toward relocated centroids.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kskm::bench::{gaussian_blobs, BlobParams};
use kskm::coloring::dsatur_assignment;
use kskm::kempe::SwapSettings;
use kskm::kmeans::kmeans_plus_plus;
use kskm::solver::{ks_perturb, ks_shift, relocate_centroids};
use kskm::{ConstraintSet, Problem, RelocationStrategy};

fn main() -> kskm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data = gaussian_blobs("blobs", BlobParams { n: 120, k: 3, dim: 2, spread: 1.0, center_box: 6.0 }, &mut rng)?;
    let problem = Problem::new(data, ConstraintSet::new([(0, 1)], [(2, 3), (4, 5)])?)?;
    let settings = SwapSettings::default();

    let mu = kmeans_plus_plus(problem.data(), 3, &mut rng);
    let (u, _) = dsatur_assignment(&problem, &mu, 1.0, &settings)?;
    let current = problem.centroids_of(&u, None)?;
    println!("start inertia {:.3}", problem.inertia_at(&u, &current));

    let (perturbed, drawn) = ks_perturb(&problem, &u, &current, &settings, &mut rng);
    println!("perturbed centroid 0 {:?}", drawn.get(0));
    println!("after perturbation {:.3}", problem.inertia_at(&perturbed, &drawn));

    let (target, matching) = relocate_centroids(&problem, &current, RelocationStrategy::UnconstrainedKmeans, &mut rng);
    let shifted = ks_shift(&problem, &u, &current, &target, 0.5, matching, &settings);
    let mu_shift = problem.centroids_of(&shifted, Some(&current))?;
    println!("after half-step shift {:.3}", problem.inertia_at(&shifted, &mu_shift));
    Ok(())
}

//! Compare the swap-based solver with the two COP-K-Means style baselines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kskm::bench::{gaussian_blobs, generate_constraints, BlobParams};
use kskm::kmeans::kmeans_plus_plus;
use kskm::solver::solve;
use kskm::{Mode, Problem, SolverConfig};

fn main() -> kskm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data = gaussian_blobs("blobs", BlobParams { n: 150, k: 5, dim: 2, spread: 2.0, center_box: 8.0 }, &mut rng)?;
    let cons = generate_constraints(data.labels().unwrap(), 0.02, &mut rng)?;
    let init = kmeans_plus_plus(&data, 5, &mut rng);
    let problem = Problem::new(data, cons)?;

    for mode in Mode::ALL {
        let cfg = SolverConfig::new(5, mode).with_seed(1).with_explorations(30).with_initial_centroids(init.clone());
        match solve(&problem, &cfg) {
            Ok(sol) => println!("{mode:<9} inertia {:.3}", sol.inertia),
            Err(e) => println!("{mode:<9} failed: {e}"),
        }
    }
    Ok(())
}

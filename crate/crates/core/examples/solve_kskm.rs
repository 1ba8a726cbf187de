//! Full constrained clustering run on synthetic blobs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kskm::bench::{adjusted_rand_index, gaussian_blobs, generate_constraints, BlobParams};
use kskm::solver::solve;
use kskm::{Mode, Problem, SolverConfig};

fn main() -> kskm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = BlobParams { n: 200, k: 4, dim: 2, spread: 1.5, center_box: 8.0 };
    let data = gaussian_blobs("blobs", params, &mut rng)?;
    let truth = data.labels().unwrap().to_vec();
    let cons = generate_constraints(&truth, 0.01, &mut rng)?;
    println!("{} must-links, {} cannot-links", cons.must_link().len(), cons.cannot_link().len());
    let problem = Problem::new(data, cons)?;

    let cfg = SolverConfig::new(4, Mode::Kskm).with_seed(3).with_explorations(50);
    let sol = solve(&problem, &cfg)?;
    let labels = sol.point_labels(&problem);
    println!("inertia {:.3} after {} mutations", sol.inertia, sol.mutations);
    println!("feasible {}", sol.feasible);
    println!("ARI vs truth {:.3}", adjusted_rand_index(&labels, &truth)?);
    Ok(())
}

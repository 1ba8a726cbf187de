//! Enumerate Kempe chains between two clusters and apply the improving ones.

use kskm::kempe::{kempe_chains, swap_cost, swap_to_fixed_point, Scope, SwapSettings};
use kskm::{Assignment, Centroids, ConstraintSet, Dataset, Problem};

fn main() -> kskm::Result<()> {
    // Two groups on a line with points 1 and 5 on the wrong side.
    let points = [0.0, 0.5, 1.0, 4.0, 4.5, 5.0];
    let data = Dataset::from_flat("line", 6, 1, points.to_vec(), None)?;
    let cons = ConstraintSet::new([], [(0, 3), (2, 4)])?;
    let problem = Problem::new(data, cons)?;
    let u = Assignment::new(vec![0, 1, 0, 1, 1, 0], 2)?;
    let mu = Centroids::new(2, 1, vec![0.5, 4.5])?;
    println!("start labels {:?}, inertia {:.3}", u.as_slice(), problem.inertia_at(&u, &mu));

    for chain in kempe_chains(&problem, &u, 0, 1) {
        println!("chain {:?} -> cost {:+.3}", chain.nodes().collect::<Vec<_>>(), swap_cost(&chain, &mu));
    }

    let settings = SwapSettings::default();
    let fixed = swap_to_fixed_point(&problem, &u, &mu, &settings, Scope::default());
    println!("after swaps {:?}, inertia {:.3}", fixed.as_slice(), problem.inertia_at(&fixed, &mu));
    Ok(())
}

//! Optimal constrained assignment for fixed centroids by branch-and-bound.

use kskm::gcp::{solve_gcp, GcpInstance, GcpMode, GcpOutcome};
use kskm::{Centroids, ConstraintSet, Dataset, Error, Problem};

fn main() -> kskm::Result<()> {
    let points = [0.0, 0.1, 0.2, 3.0, 3.1, 6.0];
    let data = Dataset::from_flat("line", 6, 1, points.to_vec(), None)?;
    let cons = ConstraintSet::new([], [(0, 1), (1, 2), (0, 2), (3, 4)])?;
    let problem = Problem::new(data, cons)?;
    let mu = Centroids::new(3, 1, vec![0.0, 3.0, 6.0])?;

    let inst = GcpInstance::from_problem(&problem, &mu);
    if let GcpOutcome::Solved { assignment, cost, optimal } = solve_gcp(&inst)? {
        println!("optimal labels {:?}, cost {cost:.3}, proven {optimal}", problem.expand(&assignment));

        // Ask only for something strictly better than a known incumbent.
        let again = solve_gcp(&inst.clone().with_incumbent(cost).with_mode(GcpMode::FirstImproving))?;
        println!("improving on the optimum: {again:?}");
    }

    // Two colors cannot cover a triangle.
    let two = Centroids::new(2, 1, vec![0.0, 6.0])?;
    match solve_gcp(&GcpInstance::from_problem(&problem, &two)) {
        Err(Error::Infeasible { k }) => println!("no proper assignment with k = {k}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

//! Build a feasible starting partition with the two DSATUR variants.

use kskm::coloring::{dsatur_assignment, dsatur_color};
use kskm::kempe::SwapSettings;
use kskm::{Centroids, ConstraintSet, Dataset, Problem};

fn main() -> kskm::Result<()> {
    let points = [0.0, 0.2, 0.4, 5.0, 5.3, 9.8, 10.0, 10.1];
    let data = Dataset::from_flat("line", points.len(), 1, points.to_vec(), None)?;
    let cons = ConstraintSet::new([(0, 1)], [(1, 2), (3, 4), (6, 7)])?;
    let problem = Problem::new(data, cons)?;

    let classic = dsatur_color(problem.graph());
    println!("classic DSATUR uses {} colors: {:?}", classic.k(), classic.as_slice());

    let mu = Centroids::new(3, 1, vec![0.0, 5.0, 10.0])?;
    let (u, route) = dsatur_assignment(&problem, &mu, 1.0, &SwapSettings::default())?;
    println!("route {route:?}");
    println!("point labels {:?}", problem.expand(&u));
    println!("inertia at the given centroids {:.4}", problem.inertia_at(&u, &mu));
    Ok(())
}

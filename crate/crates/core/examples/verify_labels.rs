//! Score a labeling: constraint violations, empty clusters, inertia and ARI.

use kskm::bench::{adjusted_rand_index, verify_labels};
use kskm::{ConstraintSet, Dataset};

fn main() -> kskm::Result<()> {
    let data = Dataset::from_rows("pts", vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![5.0, 5.0], vec![5.0, 6.0]], None)?;
    let cons = ConstraintSet::new([(0, 1)], [(1, 2)])?;

    for labels in [vec![0, 0, 1, 1], vec![0, 1, 1, 0]] {
        let v = verify_labels(&data, &cons, &labels, Some(2))?;
        println!(
            "{labels:?}: ml {} cl {} empty {:?} inertia {:.2} feasible {}",
            v.ml_violations,
            v.cl_violations,
            v.empty_clusters,
            v.inertia,
            v.is_feasible()
        );
    }
    println!("ARI of a relabeling {:.3}", adjusted_rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0])?);
    Ok(())
}

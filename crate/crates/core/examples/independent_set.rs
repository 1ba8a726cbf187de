//! Pick a best conflict-free subset of weighted candidates.

use kskm::mwis::{solve_exact, solve_heuristic, MwisInstance};

fn main() -> kskm::Result<()> {
    let weights = vec![4.0, 3.0, 3.0, 2.5, 1.0, 5.0];
    // Candidates 0, 1, 2 are mutually exclusive; a few extra pairwise conflicts.
    let inst = MwisInstance::new(weights, vec![vec![0, 1, 2]], vec![(1, 3), (3, 5), (4, 5)])?;

    let exact = solve_exact(&inst, u64::MAX);
    println!("exact     {:?} value {:.2} optimal {}", exact.chosen, exact.value, exact.optimal);
    let heur = solve_heuristic(&inst);
    println!("heuristic {:?} value {:.2}", heur.chosen, heur.value);
    Ok(())
}

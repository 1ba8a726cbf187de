//! Draw constraints from ground-truth labels and write them in the text format.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kskm::bench::generate_constraints;
use kskm::constraints::{format_constraints, parse_constraints};

fn main() -> kskm::Result<()> {
    let labels = [0, 0, 0, 1, 1, 1, 2, 2, 2, 2];
    let set = generate_constraints(&labels, 0.2, &mut ChaCha8Rng::seed_from_u64(1))?;
    let text = format_constraints(&set);
    print!("{text}");
    assert!(set.is_satisfied_by(&labels));
    assert_eq!(parse_constraints(&text)?, set);
    Ok(())
}

//! Collapse must-links into super-nodes and inspect the cannot-link graph.

use kskm::constraints::{connected_components, parse_constraints, preprocess};

fn main() -> kskm::Result<()> {
    let text = "ML 0 1\nML 1 2\nML 4 5\nCL 2 3\nCL 0 4\n";
    let cons = parse_constraints(text)?;
    let g = preprocess(&cons, 7)?;
    for v in 0..g.len() {
        println!("node {v}: points {:?}, neighbours {:?}", g.members(v), g.neighbors(v));
    }
    for (i, comp) in connected_components(&g).iter().enumerate() {
        println!("component {i}: nodes {:?}", comp.nodes);
    }

    // A must-link between cannot-linked points is rejected up front.
    let bad = parse_constraints("ML 0 1\nCL 1 0\n").and_then(|c| preprocess(&c, 2));
    println!("contradictory input: {}", bad.unwrap_err());
    Ok(())
}

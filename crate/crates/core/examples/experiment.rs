//! Run a small benchmark grid from an inline TOML spec and print the summary.

use std::path::Path;

use kskm::bench::{run_experiment, ExperimentSpec};

const SPEC: &str = r#"
runs = 3
base_seed = 1
levels = [0.01, 0.03]
modes = ["kskm", "copkm", "dsaturkm"]
baseline = "copkm"
explorations = 20

[[datasets]]
name = "blobs"
blobs = { n = 100, k = 4, seed = 2 }
"#;

fn main() -> kskm::Result<()> {
    let spec = ExperimentSpec::parse(SPEC)?;
    let report = run_experiment(&spec, Path::new("."))?;
    print!("{}", report.summary_table());
    if let Some(dir) = std::env::args().nth(1) {
        report.write(Path::new(&dir))?;
    }
    Ok(())
}

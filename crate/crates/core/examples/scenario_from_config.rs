//! Loads a scenario file, runs it with all output streams and prints the
//! summary. Defaults to the bundled data-driven axial example.

use std::path::PathBuf;

use ddcd::scenario::{load_scenario, run_scenario};

fn main() -> ddcd::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/axial_data.toml")
    });
    let scenario = load_scenario(&path)?;
    let (summary, _) = run_scenario(&scenario)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    println!("outputs in {}", scenario.output.dir.display());
    Ok(())
}

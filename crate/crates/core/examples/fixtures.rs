//! Derived constants of the reference configuration as JSON.

use crossres::harness::{ExperimentConfig, Fixtures};

fn main() -> crossres::Result<()> {
    let cfg = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/reference.json"))?;
    let f = Fixtures::compute(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&f)?);
    Ok(())
}

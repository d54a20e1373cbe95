//! Loads a scenario file, runs it and writes the JSON and CSV reports.
//!
//! `cargo run --example scenario -- examples/scenarios/inline.toml out/`

use std::path::PathBuf;

use pfc::scenario::{emit, run, OutputFormat, ScenarioConfig};

fn main() -> pfc::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenarios/scalar_exp.toml").into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().join("pfc-scenario").display().to_string()));

    let config = ScenarioConfig::load(&path)?;
    let report = run(&config)?;
    for r in &report.results {
        println!("{:<15} {:?} failed bounds: {}", r.check.as_str(), r.status, r.failed_bounds());
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for f in emit(&report, &out, OutputFormat::Both)? {
        println!("wrote {}", f.display());
    }
    std::process::exit(report.exit_code());
}

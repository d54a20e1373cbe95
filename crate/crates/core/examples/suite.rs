//! The full acceptance suite, as run by `pfc check --all`.

use pfc::suite::{run_suite, SuiteOptions};

fn main() {
    let report = run_suite(&SuiteOptions::default());
    for c in &report.criteria {
        println!("{}", c.line());
    }
    println!("total {:.2} s", report.timing.total_seconds);
}

//! Pairs of parameters that get arbitrarily close while the solutions of
//! `x' = sin(1/μ)` stay a unit apart.
//!
//! Run with `cargo run --example counterexample -- 12`.

use pfc::lab::counterexample_witness;

fn main() -> pfc::Result<()> {
    let n_max: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    println!("{:>3}  {:>22}  {:>22}  {:>12}  {:>14}", "n", "mu1", "mu2", "separation", "sup gap");
    for n in 1..=n_max {
        let w = counterexample_witness(n)?;
        println!("{n:>3}  {:>22.16}  {:>22.16}  {:>12.6e}  {:>14.10}", w.mu1[0], w.mu2[0], w.separation, w.gap);
    }
    Ok(())
}

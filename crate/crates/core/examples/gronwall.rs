//! Gronwall-type domination for `x' = μ sin(1/μ) x`: the solution gap of each
//! pair stays below `ε (b - a) e^{L (b - a)}`, with `ε` the measured field gap.

use pfc::lab::{mu_sin_inv_x, verify_theorem2_measured, PairSampler};
use pfc::ode::{gronwall_bound, DEFAULT_TOL};

fn main() -> pfc::Result<()> {
    let problem = mu_sin_inv_x();
    let pairs = PairSampler::with_seed(1).check_pairs(problem.param_box(), 12);
    let reports = verify_theorem2_measured(&problem, &pairs, DEFAULT_TOL)?;
    println!("{:>10} {:>10} {:>14} {:>14} {:>6}", "mu1", "mu2", "bound", "measured", "ok");
    for r in &reports {
        let mu2 = r.mu2.as_ref().map_or(f64::NAN, |m| m[0]);
        println!("{:>10.6} {:>10.6} {:>14.6e} {:>14.6e} {:>6}", r.mu1[0], mu2, r.theoretical, r.empirical, r.passed);
    }
    println!("\nbound for eps = 0.1 on [0, 1] with L = 1: {:.6}", gronwall_bound(0.1, 1.0, 0.0, 1.0)?);
    Ok(())
}

//! A priori estimates for linear families checked against measured flows,
//! followed by the distance budget that keeps forced solutions within `ε`.

use pfc::bounds::{compute_K, DEFAULT_SAFETY};
use pfc::lab::{budget_reports, domination_reports, measure_pair, PairSampler, CAUCHY_GRID};
use pfc::linear::{random_linear, RandomLinearSpec};
use pfc::ode::DEFAULT_TOL;

fn main() -> pfc::Result<()> {
    let fam = random_linear(&RandomLinearSpec::new(2024, 3))?;
    let pairs = PairSampler::with_seed(5).check_pairs(fam.param_box(), 6);
    let points: Vec<Vec<f64>> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let c = compute_K(&fam, &points, DEFAULT_SAFETY)?;
    println!("K = {:.4}  K1 = {:.3e}  K2 = {:.3e}  K3 = {:.3e}", c.K, c.K1, c.K2, c.K3);

    let ms: Vec<_> = pairs.iter().map(|(a, b)| measure_pair(&fam, a, b, DEFAULT_TOL, CAUCHY_GRID)).collect::<Result<_, _>>()?;
    let m = &ms[0];
    println!("\npair {:.4} / {:.4}", m.mu1[0], m.mu2[0]);
    for r in domination_reports(&c, m, 1e-7) {
        println!("  {:<20} {:>12.5e} <= {:>12.5e}  {}", r.bound_name, r.empirical, r.theoretical, if r.passed { "ok" } else { "FAIL" });
    }

    for eps in [0.1, 1.0, 10.0] {
        let check = budget_reports(&c, eps, &ms, 1e-7)?;
        let [x, a, f, ..] = check.budget.thresholds();
        println!("\neps = {eps}: thresholds x < {x:.2e}, a < {a:.2e}, f < {f:.2e}; {} of {} pairs qualify", check.qualifying, check.pairs);
    }
    Ok(())
}

use std::f64::consts::PI;

use super::families::sin_inv;
use super::modulus::WitnessPair;
use super::scan::trajectory_gap;
use crate::error::{Error, Result};
use crate::ode::{solve_ivp, DEFAULT_TOL};

/// `1/(πn(2n+1))`, the separation of the `n`-th witness pair.
pub fn witness_separation(n: u32) -> f64 {
    let n = f64::from(n);
    1.0 / (PI * n * (2.0 * n + 1.0))
}

/// Witness pair `μ₁ = 1/(πn)`, `μ₂ = 1/(πn + π/2)` for `x' = sin(1/μ)`, with
/// the gap measured from two numerical solves.
pub fn counterexample_witness(n: u32) -> Result<WitnessPair> {
    counterexample_witness_tol(n, DEFAULT_TOL)
}

pub fn counterexample_witness_tol(n: u32, tol: f64) -> Result<WitnessPair> {
    if n == 0 {
        return Err(Error::InvalidArgument("witness index n must be at least 1".into()));
    }
    let nf = f64::from(n);
    let mu1 = vec![1.0 / (PI * nf)];
    let mu2 = vec![1.0 / (PI * nf + PI / 2.0)];
    let problem = sin_inv();
    let x1 = solve_ivp(&problem, &mu1, tol)?;
    let x2 = solve_ivp(&problem, &mu2, tol)?;
    let gap = trajectory_gap(&x1, &x2)?;
    Ok(WitnessPair { mu1, mu2, separation: witness_separation(n), gap })
}

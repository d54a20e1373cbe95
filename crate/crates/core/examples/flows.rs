//! Fundamental matrix, inverse flow, Cauchy matrix and the two routes to the
//! forced solution on a seeded random 3×3 family.

use pfc::linear::{
    cauchy_matrix, fundamental_matrix, inverse_flow, random_linear, rho_metric, solve_linear_direct,
    variation_of_constants, RandomLinearSpec,
};
use pfc::norm::matrix_dist;
use pfc::ode::DEFAULT_TOL;

fn main() -> pfc::Result<()> {
    let fam = random_linear(&RandomLinearSpec::new(7, 3))?;
    let mu = [0.4];
    let x = fundamental_matrix(&fam, &mu, DEFAULT_TOL)?;
    let z = inverse_flow(&fam, &mu, DEFAULT_TOL)?;
    println!("t0 = {:.4}, {} steps for X, {} for Z", fam.t0(), x.nodes().len(), z.nodes().len());
    println!("X(1) =\n{:.6}", x.eval(1.0)?);

    let e = nalgebra::DMatrix::identity(3, 3);
    let mut worst = 0.0f64;
    for k in 0..=100 {
        let t = k as f64 / 100.0;
        worst = worst.max(matrix_dist(&(z.eval(t)? * x.eval(t)?), &e));
    }
    println!("max ‖Z X - E‖ on a grid: {worst:.3e}");

    let c = cauchy_matrix(&x, &z, 0.9, 0.2)? * cauchy_matrix(&x, &z, 0.2, 0.6)?;
    println!("‖C(0.9,0.2) C(0.2,0.6) - C(0.9,0.6)‖ = {:.3e}", matrix_dist(&c, &cauchy_matrix(&x, &z, 0.9, 0.6)?));

    let voc = variation_of_constants(&fam, &mu, DEFAULT_TOL)?;
    let direct = solve_linear_direct(&fam, &mu, DEFAULT_TOL)?;
    println!("‖Y_voc(1) - Y_direct(1)‖ = {:.3e}", matrix_dist(&voc.eval(1.0)?, &direct.eval(1.0)?));

    let other = solve_linear_direct(&fam, &[0.45], DEFAULT_TOL)?;
    println!("rho(Y(0.4), Y(0.45)) = {:.6}", rho_metric(&fam, &direct, &other)?);
    Ok(())
}

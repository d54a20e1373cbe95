//! Integral seminorms in `Lᵖ` and the Hölder inequality on random piecewise
//! polynomials.

use pfc::bounds::holder_pair_bound;
use pfc::lab::scalar_exp;
use pfc::linear::{lp_norm, lp_seminorms};
use pfc::quadrature::{integrate, QuadOptions};
use pfc::suite::random_scalar_poly;
use rand::SeedableRng;

fn main() -> pfc::Result<()> {
    let fam = scalar_exp();
    for p in [1.5, 2.0, 3.0] {
        let s = lp_seminorms(&fam, &[1.0], &[0.5], p)?;
        println!("p = {p}: a_p = {:.6}, n_q = {:.6}", s.a_p, s.n_q);
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let quad = QuadOptions::with_tol(1e-12);
    for _ in 0..5 {
        let (f, g) = (random_scalar_poly(&mut rng), random_scalar_poly(&mut rng));
        let breaks: Vec<f64> = f.interior_breaks().iter().chain(g.interior_breaks()).copied().collect();
        let fv = |t: f64| f.eval(t)[(0, 0)];
        let gv = |t: f64| g.eval(t)[(0, 0)];
        let lhs = integrate(|t| (fv(t) * gv(t)).abs(), 0.0, 1.0, &breaks, quad)?;
        let rhs = holder_pair_bound(lp_norm(fv, 3.0, (0.0, 1.0), &breaks, quad)?, lp_norm(gv, 1.5, (0.0, 1.0), &breaks, quad)?);
        println!("∫|fg| = {lhs:.6} <= {rhs:.6}");
    }
    Ok(())
}

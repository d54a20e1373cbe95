//! Parameter-dependent Cauchy problems and their numerical solution.

pub(crate) mod dopri;
mod problem;
mod trajectory;

pub use problem::{solve_ivp, ParamCauchyProblem, VectorField, DEFAULT_TOL};
pub use trajectory::{eval_trajectory, Trajectory};

pub(crate) use dopri::{integrate, SolverOptions};

use crate::error::{Error, Result};

/// Sensitivity bound `ε (b - a) e^{L (b - a)}` for solutions whose vector
/// fields differ by less than `ε` uniformly, `L` being the Lipschitz constant
/// in the state.
pub fn gronwall_bound(eps: f64, lipschitz_l: f64, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidInterval { a, b });
    }
    if !(eps > 0.0) || !(lipschitz_l >= 0.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0 and L >= 0, got eps = {eps}, L = {lipschitz_l}")));
    }
    let len = b - a;
    Ok(eps * len * (lipschitz_l * len).exp())
}

/// The `δ = ε / M` that a Lipschitz-in-parameter constant `M` guarantees.
pub fn lipschitz_delta(eps: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::NonpositiveM(m));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    Ok(eps / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn gronwall_values() {
        assert_eq!(gronwall_bound(1.0, 0.0, 0.0, 1.0).unwrap(), 1.0);
        assert!((gronwall_bound(0.5, 1.0, 0.0, 1.0).unwrap() - 0.5 * E).abs() < 1e-15);
        assert!((gronwall_bound(1.0, 2.0, 0.0, 2.0).unwrap() - 2.0 * E.powi(4)).abs() < 1e-12);
        assert!((gronwall_bound(1.0, 2.0, 0.0, 2.0).unwrap() - 109.1963).abs() < 1e-4);
    }

    #[test]
    fn gronwall_rejects_bad_input() {
        assert!(matches!(gronwall_bound(1.0, 0.0, 1.0, 1.0), Err(Error::InvalidInterval { .. })));
        assert!(gronwall_bound(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(gronwall_bound(1.0, -0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn lipschitz_delta_values() {
        assert_eq!(lipschitz_delta(1.0, 1.0).unwrap(), 1.0);
        assert!((lipschitz_delta(0.3, 6.0).unwrap() - 0.05).abs() < 1e-16);
        assert!((lipschitz_delta(1e-3, 2.0).unwrap() - 5e-4).abs() < 1e-18);
        assert_eq!(lipschitz_delta(1.0, 0.0), Err(Error::NonpositiveM(0.0)));
        assert_eq!(lipschitz_delta(1.0, -2.0), Err(Error::NonpositiveM(-2.0)));
    }
}

use std::fmt;
use std::sync::Arc;

use super::dopri::{self, SolverOptions};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::param::ParamBox;

/// Right-hand side `f(t, x, μ)` writing into its last argument.
pub type VectorField = Arc<dyn Fn(f64, &[f64], &[f64], &mut [f64]) + Send + Sync>;

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Parameter-dependent initial value problem `x' = f(t, x, μ)`, `x(t0) = x0`
/// on a compact interval `[a, b]`, with the constants the continuity theory
/// needs: the Lipschitz constant `L` of `f` in `x` and the bound `m` on `‖f‖`.
#[derive(Clone)]
pub struct ParamCauchyProblem {
    rhs: VectorField,
    t0: f64,
    x0: Vec<f64>,
    interval: (f64, f64),
    param_box: ParamBox,
    lipschitz_l: f64,
    dominating_m_bound: f64,
    breakpoints: Vec<f64>,
    state_bound: Option<f64>,
}

impl fmt::Debug for ParamCauchyProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCauchyProblem")
            .field("t0", &self.t0)
            .field("x0", &self.x0)
            .field("interval", &self.interval)
            .field("param_box", &self.param_box)
            .field("lipschitz_l", &self.lipschitz_l)
            .field("dominating_m_bound", &self.dominating_m_bound)
            .finish_non_exhaustive()
    }
}

impl ParamCauchyProblem {
    pub fn new(
        rhs: VectorField,
        t0: f64,
        x0: Vec<f64>,
        interval: (f64, f64),
        param_box: ParamBox,
        lipschitz_l: f64,
        dominating_m_bound: f64,
    ) -> Result<Self> {
        let (a, b) = interval;
        if !(a < b) || !(a..=b).contains(&t0) {
            return Err(Error::InvalidInterval { a, b });
        }
        if x0.is_empty() {
            return Err(Error::InvalidArgument("initial state is empty".into()));
        }
        if !(lipschitz_l >= 0.0) || !(dominating_m_bound >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "constants must be nonnegative (L = {lipschitz_l}, m = {dominating_m_bound})"
            )));
        }
        Ok(Self {
            rhs,
            t0,
            x0,
            interval,
            param_box,
            lipschitz_l,
            dominating_m_bound,
            breakpoints: Vec::new(),
            state_bound: None,
        })
    }

    /// Declares times where `f` may jump in `t`; integration restarts there.
    pub fn with_breakpoints(mut self, mut breakpoints: Vec<f64>) -> Self {
        breakpoints.sort_by(f64::total_cmp);
        self.breakpoints = breakpoints;
        self
    }

    /// Aborts integration with [`Error::DomainEscape`] once `‖x‖ > bound`.
    pub fn with_state_bound(mut self, bound: f64) -> Self {
        self.state_bound = Some(bound);
        self
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn param_box(&self) -> &ParamBox {
        &self.param_box
    }

    pub fn lipschitz_l(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn dominating_m_bound(&self) -> f64 {
        self.dominating_m_bound
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn state_bound(&self) -> Option<f64> {
        self.state_bound
    }

    pub fn rhs(&self) -> &VectorField {
        &self.rhs
    }

    pub fn eval_rhs(&self, t: f64, x: &[f64], mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        (self.rhs)(t, x, mu, &mut out);
        out
    }
}

/// Solves the problem at parameter `mu` over the whole interval.
pub fn solve_ivp(problem: &ParamCauchyProblem, mu: &[f64], tol: f64) -> Result<Trajectory> {
    problem.param_box.check(mu)?;
    let mut opts = SolverOptions::new(tol);
    opts.state_bound = problem.state_bound;
    let rhs = &problem.rhs;
    dopri::integrate(
        |t, x, dx| rhs(t, x, mu, dx),
        problem.t0,
        &problem.x0,
        problem.interval,
        &problem.breakpoints,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(rhs: VectorField, x0: f64, t0: f64) -> ParamCauchyProblem {
        ParamCauchyProblem::new(rhs, t0, vec![x0], (0.0, 1.0), ParamBox::interval(0.0, 2.0).unwrap(), 1.0, 1.0)
            .unwrap()
    }

    #[test]
    fn zero_field_stays_at_zero() {
        let p = scalar(Arc::new(|_, _, _, dx| dx[0] = 0.0), 0.0, 0.0);
        let traj = solve_ivp(&p, &[1.0], DEFAULT_TOL).unwrap();
        assert!(traj.states().all(|s| s[0] == 0.0));
        assert_eq!(traj.eval(0.37).unwrap(), vec![0.0]);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let p = scalar(Arc::new(|_, x, _, dx| dx[0] = x[0]), 1.0, 0.0);
        let traj = solve_ivp(&p, &[1.0], DEFAULT_TOL).unwrap();
        assert!((traj.eval(1.0).unwrap()[0] - std::f64::consts::E).abs() < 1e-8);
        assert!((traj.eval(0.5).unwrap()[0] - 0.5f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn parameter_outside_box_rejected() {
        let p = scalar(Arc::new(|_, _, _, dx| dx[0] = 0.0), 0.0, 0.0);
        assert!(solve_ivp(&p, &[2.0], DEFAULT_TOL).is_err());
        assert!(solve_ivp(&p, &[1.0], 0.0).is_err());
    }

    #[test]
    fn interior_initial_time() {
        let p = scalar(Arc::new(|_, x, _, dx| dx[0] = -x[0]), 1.0, 0.25);
        let traj = solve_ivp(&p, &[1.0], DEFAULT_TOL).unwrap();
        assert_eq!(traj.span(), (0.0, 1.0));
        assert!(traj.nodes().contains(&0.25));
        assert!((traj.eval(0.0).unwrap()[0] - 0.25f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn invalid_construction() {
        let f: VectorField = Arc::new(|_, _, _, dx| dx[0] = 0.0);
        let b = ParamBox::interval(0.0, 1.0).unwrap();
        assert!(ParamCauchyProblem::new(f.clone(), 0.0, vec![0.0], (1.0, 0.0), b.clone(), 0.0, 0.0).is_err());
        assert!(ParamCauchyProblem::new(f.clone(), 2.0, vec![0.0], (0.0, 1.0), b.clone(), 0.0, 0.0).is_err());
        assert!(ParamCauchyProblem::new(f, 0.0, vec![0.0], (0.0, 1.0), b, -1.0, 0.0).is_err());
    }
}

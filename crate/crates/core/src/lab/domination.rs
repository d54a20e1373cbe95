use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::{linspace, matrix_gap, sup_times, trajectory_gap};
use crate::bounds::{
    compute_K, lemma2_bounds, lemma3_bound, lemma4_bounds, lemma5_bound, theorem3_delta_budget, BoundConstants,
    BoundReport, DeltaBudget, DEFAULT_SAFETY,
};
use crate::error::{Error, Result};
use crate::linear::{
    fundamental_matrix, inverse_flow, param_distances, rho_metric, seminorms, solve_linear_direct, LinearFamily,
    MatrixTrajectory, ParamDistances, SeminormSet,
};
use crate::norm::{matrix_dist, matrix_norm, vec_dist};
use crate::ode::{solve_ivp, ParamCauchyProblem, Trajectory};

/// Points per axis of the `(t, s)` grid for Cauchy-matrix suprema.
pub const CAUCHY_GRID: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationOptions {
    pub safety: f64,
    /// Overrides the majorant otherwise computed from the pair members.
    pub constants: Option<BoundConstants>,
    pub cauchy_grid: usize,
}

impl Default for DominationOptions {
    fn default() -> Self {
        Self { safety: DEFAULT_SAFETY, constants: None, cauchy_grid: CAUCHY_GRID }
    }
}

/// Everything measured on one parameter pair of a linear family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMeasurement {
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub seminorms1: SeminormSet,
    pub seminorms2: SeminormSet,
    pub distances: ParamDistances,
    /// `max_μ sup_t ‖X(t, μ)‖`.
    pub flow_norm: f64,
    pub inverse_norm: f64,
    pub flow_diff: f64,
    pub inverse_diff: f64,
    /// Grid supremum of `‖C(t, s, μ)‖` over both members.
    pub cauchy_norm: f64,
    pub cauchy_diff: f64,
    pub flow_rho: f64,
    pub solution_norm: f64,
    pub solution_diff: f64,
    pub solution_rho: f64,
}

fn sup_norm(y: &MatrixTrajectory) -> Result<f64> {
    let mut best = 0.0f64;
    for t in sup_times(y.span(), y.nodes(), &[]) {
        best = best.max(matrix_norm(&y.eval(t)?));
    }
    Ok(best)
}

fn on_grid(y: &MatrixTrajectory, grid: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    grid.iter().map(|&t| y.eval(t)).collect()
}

/// Solves both members and measures every quantity a bound controls.
pub fn measure_pair(fam: &LinearFamily, mu1: &[f64], mu2: &[f64], tol: f64, cauchy_grid: usize) -> Result<PairMeasurement> {
    let x1 = fundamental_matrix(fam, mu1, tol)?;
    let x2 = fundamental_matrix(fam, mu2, tol)?;
    let z1 = inverse_flow(fam, mu1, tol)?;
    let z2 = inverse_flow(fam, mu2, tol)?;
    let y1 = solve_linear_direct(fam, mu1, tol)?;
    let y2 = solve_linear_direct(fam, mu2, tol)?;

    let (a, b) = fam.interval();
    let grid = linspace(a, b, cauchy_grid.max(2));
    let (gx1, gx2, gz1, gz2) = (on_grid(&x1, &grid)?, on_grid(&x2, &grid)?, on_grid(&z1, &grid)?, on_grid(&z2, &grid)?);
    let (mut cauchy_norm, mut cauchy_diff) = (0.0f64, 0.0f64);
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let c1 = &gx1[i] * &gz1[j];
            let c2 = &gx2[i] * &gz2[j];
            cauchy_norm = cauchy_norm.max(matrix_norm(&c1)).max(matrix_norm(&c2));
            cauchy_diff = cauchy_diff.max(matrix_dist(&c1, &c2));
        }
    }

    Ok(PairMeasurement {
        mu1: mu1.to_vec(),
        mu2: mu2.to_vec(),
        seminorms1: seminorms(fam, mu1)?,
        seminorms2: seminorms(fam, mu2)?,
        distances: param_distances(fam, mu1, mu2)?,
        flow_norm: sup_norm(&x1)?.max(sup_norm(&x2)?),
        inverse_norm: sup_norm(&z1)?.max(sup_norm(&z2)?),
        flow_diff: matrix_gap(&x1, &x2)?,
        inverse_diff: matrix_gap(&z1, &z2)?,
        cauchy_norm,
        cauchy_diff,
        flow_rho: rho_metric(fam, &x1, &x2)?,
        solution_norm: sup_norm(&y1)?.max(sup_norm(&y2)?),
        solution_diff: matrix_gap(&y1, &y2)?,
        solution_rho: rho_metric(fam, &y1, &y2)?,
    })
}

/// Names of the reports [`domination_reports`] emits, in order.
pub const DOMINATION_CHECKS: [&str; 11] = [
    "flow-norm",
    "inverse-norm",
    "flow-diff",
    "inverse-diff",
    "cauchy-norm",
    "cauchy-diff",
    "flow-rho",
    "solution-norm",
    "solution-diff",
    "solution-diff-sharp",
    "solution-rho",
];

/// Compares a measurement with every bound; `slack` absorbs integration error.
pub fn domination_reports(c: &BoundConstants, m: &PairMeasurement, slack: f64) -> Vec<BoundReport> {
    let (s1, s2, d) = (&m.seminorms1, &m.seminorms2, &m.distances);
    let l2 = lemma2_bounds(c, s1, s2, d.a).sharp;
    let l3 = lemma3_bound(c, s1, s2, d.a);
    let l4 = lemma4_bounds(c, s1, s2, d);
    let pairs = [
        (l2.x_norm, m.flow_norm),
        (l2.x_inv_norm, m.inverse_norm),
        (l2.x_diff, m.flow_diff),
        (l2.x_inv_diff, m.inverse_diff),
        (l2.cauchy_norm, m.cauchy_norm),
        (l2.cauchy_diff, m.cauchy_diff),
        (l3.sharp, m.flow_rho),
        (l4.y_bound, m.solution_norm),
        (l4.dy_bound, m.solution_diff),
        (l4.dy_sharp, m.solution_diff),
        (lemma5_bound(c, d), m.solution_rho),
    ];
    DOMINATION_CHECKS
        .iter()
        .zip(pairs)
        .map(|(name, (theory, emp))| BoundReport::new(*name, theory, emp, &m.mu1, Some(&m.mu2), slack))
        .collect()
}

fn pair_points(pairs: &[(Vec<f64>, Vec<f64>)]) -> Vec<Vec<f64>> {
    pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
}

fn measure_all(fam: &LinearFamily, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64, grid: usize) -> Result<Vec<PairMeasurement>> {
    pairs
        .par_iter()
        .map(|(m1, m2)| measure_pair(fam, m1, m2, tol, grid))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Checks every a priori estimate on each pair, with slack `100·tol`.
pub fn verify_domination(fam: &LinearFamily, pairs: &[(Vec<f64>, Vec<f64>)], tol: f64) -> Result<Vec<BoundReport>> {
    verify_domination_with(fam, pairs, tol, &DominationOptions::default())
}

pub fn verify_domination_with(
    fam: &LinearFamily,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
    opts: &DominationOptions,
) -> Result<Vec<BoundReport>> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let c = match opts.constants {
        Some(c) => c,
        None => compute_K(fam, &pair_points(pairs), opts.safety)?,
    };
    let ms = measure_all(fam, pairs, tol, opts.cauchy_grid)?;
    Ok(ms.iter().flat_map(|m| domination_reports(&c, m, 100.0 * tol)).collect())
}

/// Outcome of the distance-budget check for one `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetCheck {
    pub budget: DeltaBudget,
    pub pairs: usize,
    /// Pairs whose distances fall below all six thresholds.
    pub qualifying: usize,
    pub reports: Vec<BoundReport>,
}

/// For each qualifying measurement, checks `sup‖ΔY‖ < ε` and `ρ < ε`.
pub fn budget_reports(c: &BoundConstants, eps: f64, ms: &[PairMeasurement], slack: f64) -> Result<BudgetCheck> {
    let budget = theorem3_delta_budget(c, eps)?;
    let mut reports = Vec::new();
    let mut qualifying = 0;
    for m in ms.iter().filter(|m| budget.admits(&m.distances)) {
        qualifying += 1;
        reports.push(BoundReport::new("budget-uniform", eps, m.solution_diff, &m.mu1, Some(&m.mu2), slack));
        reports.push(BoundReport::new("budget-rho", eps, m.solution_rho, &m.mu1, Some(&m.mu2), slack));
    }
    Ok(BudgetCheck { budget, pairs: ms.len(), qualifying, reports })
}

pub fn verify_delta_budget(
    fam: &LinearFamily,
    eps_list: &[f64],
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
    opts: &DominationOptions,
) -> Result<Vec<BudgetCheck>> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("budget check needs at least one pair".into()));
    }
    let c = match opts.constants {
        Some(c) => c,
        None => compute_K(fam, &pair_points(pairs), opts.safety)?,
    };
    let ms = measure_all(fam, pairs, tol, opts.cauchy_grid)?;
    eps_list.iter().map(|&eps| budget_reports(&c, eps, &ms, 100.0 * tol)).collect()
}

/// Field gap along both trajectories: `sup_t max_{x ∈ {x₁(t), x₂(t)}} ‖f(t, x, μ₁) - f(t, x, μ₂)‖`.
pub fn rhs_gap_along(problem: &ParamCauchyProblem, mu1: &[f64], mu2: &[f64], x1: &Trajectory, x2: &Trajectory) -> Result<f64> {
    let n = problem.dim();
    let (mut s1, mut s2) = (vec![0.0; n], vec![0.0; n]);
    let (mut f1, mut f2) = (vec![0.0; n], vec![0.0; n]);
    let rhs = problem.rhs();
    let mut best = 0.0f64;
    for t in sup_times(x1.span(), x1.nodes(), x2.nodes()) {
        x1.eval_into(t, &mut s1)?;
        x2.eval_into(t, &mut s2)?;
        for x in [&s1, &s2] {
            rhs(t, x, mu1, &mut f1);
            rhs(t, x, mu2, &mut f2);
            best = best.max(vec_dist(&f1, &f2));
        }
    }
    Ok(best)
}

/// Per-pair Gronwall check, `eps` fixed or, when `None`, the measured field
/// gap of each pair.
fn theorem2_core(
    problem: &ParamCauchyProblem,
    eps: Option<f64>,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> Result<Vec<BoundReport>> {
    let (a, b) = problem.interval();
    let growth = (b - a) * (problem.lipschitz_l() * (b - a)).exp();
    let results: Vec<Result<BoundReport>> = pairs
        .par_iter()
        .map(|(mu1, mu2)| {
            let x1 = solve_ivp(problem, mu1, tol)?;
            let x2 = solve_ivp(problem, mu2, tol)?;
            let gap = rhs_gap_along(problem, mu1, mu2, &x1, &x2)?;
            let eps = match eps {
                Some(e) if gap > e => {
                    return Err(Error::PreconditionUnmet(format!(
                        "field gap {gap:e} exceeds eps {e:e} for pair {mu1:?}, {mu2:?}"
                    )))
                }
                Some(e) => e,
                None => gap,
            };
            let emp = trajectory_gap(&x1, &x2)?;
            Ok(BoundReport::new("gronwall", eps * growth, emp, mu1, Some(mu2), 100.0 * tol))
        })
        .collect();
    results.into_iter().collect()
}

/// Checks `sup_t ‖x(t, μ₁) - x(t, μ₂)‖ ≤ ε (b - a) e^{L (b - a)}` on each pair.
///
/// Every pair must have a measured field gap of at most `eps`.
pub fn verify_theorem2(
    problem: &ParamCauchyProblem,
    eps: f64,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> Result<Vec<BoundReport>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    theorem2_core(problem, Some(eps), pairs, tol)
}

/// [`verify_theorem2`] with each pair's own measured field gap as `ε`.
pub fn verify_theorem2_measured(
    problem: &ParamCauchyProblem,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> Result<Vec<BoundReport>> {
    theorem2_core(problem, None, pairs, tol)
}

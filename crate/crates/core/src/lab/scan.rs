use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::families::{Family, Model};
use super::modulus::{DeltaLadder, ModulusTable};
use super::sampler::{PairSampler, SampledPair};
use crate::error::{Error, Result};
use crate::linear::{param_distances, solve_linear_direct, LinearFamily, MatrixTrajectory};
use crate::norm::{matrix_dist, vec_dist};
use crate::ode::{solve_ivp, ParamCauchyProblem, Trajectory};
use crate::param::ParamBox;

/// Uniform points added to every supremum over `t`.
pub const SUP_GRID: usize = 1024;

/// Finite sample of `(t, x)` points standing in for the whole domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TxGrid {
    pub points: Vec<(f64, Vec<f64>)>,
}

impl TxGrid {
    pub fn product(ts: &[f64], xs: &[Vec<f64>]) -> Self {
        let points = ts.iter().flat_map(|&t| xs.iter().map(move |x| (t, x.clone()))).collect();
        Self { points }
    }

    /// `nt` times across `interval` crossed with a uniform `nx`-per-axis grid
    /// on `[x_lo, x_hi]^dim`.
    pub fn uniform(interval: (f64, f64), nt: usize, dim: usize, (x_lo, x_hi): (f64, f64), nx: usize) -> Self {
        let ts = linspace(interval.0, interval.1, nt.max(1));
        let axis = linspace(x_lo, x_hi, nx.max(1));
        let mut xs: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..dim {
            xs = xs.iter().flat_map(|x| axis.iter().map(move |&v| [x.as_slice(), &[v]].concat())).collect();
        }
        Self::product(&ts, &xs)
    }

    /// 17 times, and 5 points per state axis on `[-2, 2]`.
    pub fn default_for(fam: &Family) -> Self {
        Self::uniform(fam.interval(), 17, fam.state_dim(), (-2.0, 2.0), 5)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let mut v: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
    v[n - 1] = b;
    v
}

/// Union of two node sets and a uniform grid over `span`.
pub(crate) fn sup_times(span: (f64, f64), n1: &[f64], n2: &[f64]) -> Vec<f64> {
    let mut ts: Vec<f64> = linspace(span.0, span.1, SUP_GRID);
    ts.extend_from_slice(n1);
    ts.extend_from_slice(n2);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// `sup_t ‖x₁(t) - x₂(t)‖`.
pub fn trajectory_gap(x1: &Trajectory, x2: &Trajectory) -> Result<f64> {
    let mut best = 0.0f64;
    let (mut a, mut b) = (vec![0.0; x1.dim()], vec![0.0; x2.dim()]);
    for t in sup_times(x1.span(), x1.nodes(), x2.nodes()) {
        x1.eval_into(t, &mut a)?;
        x2.eval_into(t, &mut b)?;
        best = best.max(vec_dist(&a, &b));
    }
    Ok(best)
}

/// `sup_t ‖Y₁(t) - Y₂(t)‖`.
pub fn matrix_gap(y1: &MatrixTrajectory, y2: &MatrixTrajectory) -> Result<f64> {
    let mut best = 0.0f64;
    for t in sup_times(y1.span(), y1.nodes(), y2.nodes()) {
        best = best.max(matrix_dist(&y1.eval(t)?, &y2.eval(t)?));
    }
    Ok(best)
}

/// Evaluates `gap` on each pair in parallel, keeping pool order.
pub(crate) fn par_gaps<G>(pool: &[SampledPair], gap: G) -> Result<Vec<f64>>
where
    G: Fn(&SampledPair) -> Result<f64> + Sync + Send,
{
    pool.par_iter().map(gap).collect::<Vec<_>>().into_iter().collect()
}

fn check_grid(grid: &TxGrid) -> Result<()> {
    if grid.is_empty() {
        Err(Error::InvalidArgument("tx grid is empty".into()))
    } else {
        Ok(())
    }
}

fn field_gap<F>(f: &F, grid: &TxGrid, mu1: &[f64], mu2: &[f64]) -> f64
where
    F: Fn(f64, &[f64], &[f64]) -> Vec<f64>,
{
    grid.points.iter().map(|(t, x)| vec_dist(&f(*t, x, mu1), &f(*t, x, mu2))).fold(0.0, f64::max)
}

/// Empirical modulus of `μ ↦ F(t, x, μ)` taken uniformly over `grid`.
pub fn equicontinuity_scan<F>(
    f: F,
    grid: &TxGrid,
    sampler: &PairSampler,
    param_box: &ParamBox,
    ladder: &DeltaLadder,
) -> Result<ModulusTable>
where
    F: Fn(f64, &[f64], &[f64]) -> Vec<f64> + Sync,
{
    check_grid(grid)?;
    let pool = sampler.pool(param_box, ladder)?;
    let gaps = par_gaps(&pool, |p| Ok(field_gap(&f, grid, &p.mu1, &p.mu2)))?;
    Ok(ModulusTable::from_gaps(ladder, &pool, &gaps))
}

/// Largest difference quotient `‖F(μ₁) - F(μ₂)‖ / ‖μ₁ - μ₂‖` over the grid:
/// a lower estimate of the Lipschitz constant in `μ`.
pub fn lipschitz_scan<F>(f: F, grid: &TxGrid, mu_pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64>
where
    F: Fn(f64, &[f64], &[f64]) -> Vec<f64> + Sync,
{
    check_grid(grid)?;
    let quotients: Vec<Result<f64>> = mu_pairs
        .par_iter()
        .map(|(m1, m2)| {
            let sep = vec_dist(m1, m2);
            if !(sep > 0.0) {
                return Err(Error::InvalidArgument(format!("coincident pair {m1:?}")));
            }
            Ok(field_gap(&f, grid, m1, m2) / sep)
        })
        .collect();
    quotients.into_iter().try_fold(0.0f64, |acc, q| Ok(acc.max(q?)))
}

/// Empirical modulus of `μ ↦ x(·, μ)` in the uniform norm over `[a, b]`.
pub fn solution_modulus(
    problem: &ParamCauchyProblem,
    sampler: &PairSampler,
    ladder: &DeltaLadder,
    tol: f64,
) -> Result<ModulusTable> {
    let pool = sampler.pool(problem.param_box(), ladder)?;
    let gaps = par_gaps(&pool, |p| {
        let x1 = solve_ivp(problem, &p.mu1, tol)?;
        let x2 = solve_ivp(problem, &p.mu2, tol)?;
        trajectory_gap(&x1, &x2)
    })?;
    Ok(ModulusTable::from_gaps(ladder, &pool, &gaps))
}

/// Same as [`solution_modulus`] for the forced linear problem.
pub fn linear_solution_modulus(
    fam: &LinearFamily,
    sampler: &PairSampler,
    ladder: &DeltaLadder,
    tol: f64,
) -> Result<ModulusTable> {
    let pool = sampler.pool(fam.param_box(), ladder)?;
    let gaps = par_gaps(&pool, |p| {
        let y1 = solve_linear_direct(fam, &p.mu1, tol)?;
        let y2 = solve_linear_direct(fam, &p.mu2, tol)?;
        matrix_gap(&y1, &y2)
    })?;
    Ok(ModulusTable::from_gaps(ladder, &pool, &gaps))
}

impl Family {
    pub fn solution_modulus(&self, sampler: &PairSampler, ladder: &DeltaLadder, tol: f64) -> Result<ModulusTable> {
        match &self.model {
            Model::Nonlinear(p) => solution_modulus(p, sampler, ladder, tol),
            Model::Linear(f) => linear_solution_modulus(f, sampler, ladder, tol),
        }
    }
}

/// Moduli of `μ ↦ A(·, μ)` and `μ ↦ Φ(·, μ)` in the `L¹` norm.
pub fn integral_uc_scan(
    fam: &LinearFamily,
    sampler: &PairSampler,
    ladder: &DeltaLadder,
) -> Result<(ModulusTable, ModulusTable)> {
    let pool = sampler.pool(fam.param_box(), ladder)?;
    let dists = pool
        .par_iter()
        .map(|p| param_distances(fam, &p.mu1, &p.mu2))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let a: Vec<f64> = dists.iter().map(|d| d.a).collect();
    let f: Vec<f64> = dists.iter().map(|d| d.f).collect();
    Ok((ModulusTable::from_gaps(ladder, &pool, &a), ModulusTable::from_gaps(ladder, &pool, &f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::families::{self, build_family, h_lipschitz_pairs, FamilyParams};
    use crate::lab::modulus::Verdict;
    use crate::lab::sampler::SamplerSpec;
    use crate::ode::lipschitz_delta;

    fn small_sampler(seed: u64) -> PairSampler {
        PairSampler::new(SamplerSpec { seed, pairs_per_rung: 64, ..SamplerSpec::default() })
    }

    fn fam(name: &str) -> Family {
        build_family(name, &FamilyParams::default()).unwrap()
    }

    #[test]
    fn mu_independent_field_has_zero_modulus() {
        let grid = TxGrid::uniform((0.0, 1.0), 5, 1, (-1.0, 1.0), 3);
        let b = ParamBox::interval(0.0, 1.0).unwrap();
        let ladder = DeltaLadder::default_for(&b);
        let t = equicontinuity_scan(|t, x, _| vec![t * x[0]], &grid, &small_sampler(1), &b, &ladder).unwrap();
        assert!(t.omega.iter().all(|&w| w == 0.0));
        assert_eq!(t.verdict, Verdict::ConsistentWithUniform);
        assert_eq!(lipschitz_scan(|t, x, _| vec![t * x[0]], &grid, &[(vec![0.1], vec![0.2])]).unwrap(), 0.0);
    }

    #[test]
    fn sin_inv_field_violates() {
        let f = fam("sin-inv");
        let sampler = small_sampler(2).with_witnesses(f.witnesses.clone());
        let ladder = DeltaLadder::default_for(f.param_box());
        let t = equicontinuity_scan(&*f.field(), &TxGrid::default_for(&f), &sampler, f.param_box(), &ladder).unwrap();
        assert!(t.omega.iter().all(|&w| w >= 1.0), "{:?}", t.omega);
        assert_eq!(t.verdict, Verdict::Violates);
    }

    #[test]
    fn product_field_with_uniform_factor_decays() {
        let f = fam("mu-sin-pi");
        let sampler = small_sampler(3).with_witnesses(f.witnesses.clone());
        let ladder = DeltaLadder::default_for(f.param_box());
        let t = equicontinuity_scan(&*f.field(), &TxGrid::default_for(&f), &sampler, f.param_box(), &ladder).unwrap();
        assert!(t.omega[t.omega.len() - 1] <= 0.05, "{:?}", t.omega);
        assert_eq!(t.verdict, Verdict::ConsistentWithUniform);
        let m = lipschitz_scan(&*f.field(), &TxGrid::default_for(&f), &h_lipschitz_pairs(200)).unwrap();
        assert!(m > 100.0);
    }

    #[test]
    fn lipschitz_scan_recovers_linear_slope() {
        let grid = TxGrid::uniform((0.0, 1.0), 3, 0, (0.0, 0.0), 1);
        let pairs = vec![(vec![0.1, 0.2], vec![0.3, 0.2]), (vec![0.5, 0.5], vec![0.5, 0.9])];
        // F = S μ with S = [[2, -1], [0, 3]], ‖S‖ = 3.
        let m = lipschitz_scan(|_, _, mu| vec![2.0 * mu[0] - mu[1], 3.0 * mu[1]], &grid, &pairs).unwrap();
        assert!((3.0 * 0.95..=3.0 + 1e-12).contains(&m));
        assert!(lipschitz_scan(|_, _, mu| mu.to_vec(), &grid, &[(vec![0.1, 0.1], vec![0.1, 0.1])]).is_err());
    }

    #[test]
    fn lipschitz_delta_controls_modulus() {
        let grid = TxGrid::uniform((0.0, 1.0), 5, 1, (-1.0, 1.0), 3);
        let f = |t: f64, x: &[f64], mu: &[f64]| vec![t * x[0] + 4.0 * mu[0]];
        let b = ParamBox::interval(0.0, 1.0).unwrap();
        let pairs: Vec<_> = (1..50).map(|k| (vec![k as f64 / 100.0], vec![k as f64 / 100.0 + 0.01])).collect();
        let m = lipschitz_scan(f, &grid, &pairs).unwrap();
        let eps = 0.01;
        let delta = lipschitz_delta(eps, m * 1.05).unwrap();
        let ladder = DeltaLadder::new(vec![delta]).unwrap();
        let t = equicontinuity_scan(f, &grid, &small_sampler(5), &b, &ladder).unwrap();
        assert!(t.omega[0] <= eps);
    }

    #[test]
    fn solution_moduli() {
        let ladder = DeltaLadder::geometric(0.1, 1e-4, 4).unwrap();
        let f = fam("sin-inv");
        let sampler = small_sampler(6).with_witnesses(f.witnesses.clone());
        let t = f.solution_modulus(&sampler, &ladder, 1e-9).unwrap();
        assert!(t.omega.iter().all(|&w| w >= 1.0 - 1e-8), "{:?}", t.omega);

        let f = fam("mu-sin-inv");
        let t = f.solution_modulus(&small_sampler(6).with_witnesses(f.witnesses.clone()), &ladder, 1e-9).unwrap();
        assert!(t.omega[3] < 0.25 * t.omega[0], "{:?}", t.omega);

        let p = crate::ode::ParamCauchyProblem::new(
            std::sync::Arc::new(|_, x, _, dx| dx[0] = -x[0]),
            0.0,
            vec![1.0],
            (0.0, 1.0),
            ParamBox::interval(0.0, 1.0).unwrap(),
            1.0,
            1.0,
        )
        .unwrap();
        let t = solution_modulus(&p, &small_sampler(1), &ladder, 1e-9).unwrap();
        assert!(t.omega.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn integral_scans() {
        let ladder = DeltaLadder::geometric(0.1, 1e-3, 3).unwrap();
        let lin = families::scalar_exp();
        let (a, f) = integral_uc_scan(&lin, &small_sampler(8), &ladder).unwrap();
        for (k, d) in ladder.rungs().iter().enumerate() {
            assert!(a.omega[k] < *d && a.omega[k] >= 0.95 * d, "{} vs {d}", a.omega[k]);
        }
        assert!(f.omega.iter().all(|&w| w == 0.0));

        let s = fam("sin-inv-linear");
        let (a, _) = integral_uc_scan(s.linear().unwrap(), &small_sampler(8).with_witnesses(s.witnesses.clone()), &ladder).unwrap();
        assert!(a.omega.iter().all(|&w| w >= 1.0 - 1e-9), "{:?}", a.omega);

        let n = families::nilpotent();
        let (a, _) = integral_uc_scan(&n, &small_sampler(8), &ladder).unwrap();
        assert!(a.omega.iter().all(|&w| w == 0.0));
    }
}

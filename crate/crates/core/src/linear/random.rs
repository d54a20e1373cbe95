//! Seeded random linear families with prescribed integral budgets.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::family::LinearFamily;
use crate::error::{Error, Result};
use crate::norm::matrix_norm;
use crate::param::ParamBox;
use crate::piecewise::{ParamPiecewise, ParamTerm, PiecewisePoly};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Smoothness {
    /// One cubic piece on the whole interval.
    Smooth,
    /// `pieces` quadratic pieces with jumps between them.
    Piecewise { pieces: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomLinearSpec {
    pub seed: u64,
    pub n: usize,
    pub smoothness: Smoothness,
    /// Upper bound for `∫‖A(t, μ)‖ dt` over the parameter box.
    pub a_budget: f64,
    /// Upper bound for `∫‖Φ(t, μ)‖ dt`.
    pub phi_budget: f64,
    /// Upper bound for `‖X⁰(μ)‖`.
    pub x0_bound: f64,
}

impl RandomLinearSpec {
    pub fn new(seed: u64, n: usize) -> Self {
        Self { seed, n, smoothness: Smoothness::Piecewise { pieces: 3 }, a_budget: 2.0, phi_budget: 2.0, x0_bound: 1.0 }
    }
}

/// Tables behind a random family, exposed so scenario reports can echo them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomTables {
    pub a: ParamPiecewise,
    pub phi: ParamPiecewise,
    pub x0: ParamPiecewise,
    pub t0: f64,
}

const INTERVAL: (f64, f64) = (0.0, 1.0);

fn random_poly(rng: &mut ChaCha8Rng, n: usize, cols: usize, breaks: &[f64], degree: usize) -> PiecewisePoly {
    let pieces = (0..breaks.len() - 1)
        .map(|_| (0..=degree).map(|_| (0..n * cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect())
        .collect();
    PiecewisePoly { rows: n, cols, breaks: breaks.to_vec(), pieces }
}

fn l1_of(poly: &PiecewisePoly) -> Result<f64> {
    integrate(|t| matrix_norm(&poly.eval(t)), INTERVAL.0, INTERVAL.1, poly.interior_breaks(), QuadOptions::default())
}

/// `A = P₀ + μP₁ + μ²P₂` (similarly `Φ`, and `X⁰ = B₀ + μB₁`) on `μ ∈ (0, 1)`,
/// scaled so that the triangle inequality caps each integral at its budget.
pub fn random_tables(spec: &RandomLinearSpec) -> Result<RandomTables> {
    if spec.n == 0 {
        return Err(Error::InvalidArgument("random family needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (breaks, degree) = match spec.smoothness {
        Smoothness::Smooth => (vec![INTERVAL.0, INTERVAL.1], 3),
        Smoothness::Piecewise { pieces } => {
            let pieces = pieces.max(1);
            let mut inner: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(0.1..0.9)).collect();
            inner.sort_by(f64::total_cmp);
            let mut b = vec![INTERVAL.0];
            b.extend(inner);
            b.push(INTERVAL.1);
            b.dedup();
            (b, 2)
        }
    };
    let t0 = rng.gen_range(INTERVAL.0..INTERVAL.1);
    let n = spec.n;

    let mut field = |budget: f64| -> Result<ParamPiecewise> {
        let mut polys: Vec<PiecewisePoly> = (0..3).map(|_| random_poly(&mut rng, n, n, &breaks, degree)).collect();
        let total: f64 = polys.iter().map(l1_of).sum::<Result<f64>>()?;
        if total > 0.0 {
            polys.iter_mut().for_each(|p| p.scale(budget / total));
        }
        Ok(ParamPiecewise {
            rows: n,
            cols: n,
            terms: polys.into_iter().enumerate().map(|(k, poly)| ParamTerm { mu_powers: vec![k as u32], poly }).collect(),
        })
    };
    let a = field(spec.a_budget)?;
    let phi = field(spec.phi_budget)?;

    let b0 = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let b1 = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let s = spec.x0_bound / (matrix_norm(&b0) + matrix_norm(&b1)).max(f64::MIN_POSITIVE);
    let x0 = ParamPiecewise {
        rows: n,
        cols: n,
        terms: vec![
            ParamTerm { mu_powers: vec![0], poly: PiecewisePoly::constant(&(b0 * s), INTERVAL.0, INTERVAL.1) },
            ParamTerm { mu_powers: vec![1], poly: PiecewisePoly::constant(&(b1 * s), INTERVAL.0, INTERVAL.1) },
        ],
    };
    Ok(RandomTables { a, phi, x0, t0 })
}

/// The `random-linear` catalog family.
pub fn random_linear(spec: &RandomLinearSpec) -> Result<LinearFamily> {
    let tables = random_tables(spec)?;
    LinearFamily::from_tables(tables.a, tables.phi, tables.x0, INTERVAL, tables.t0, ParamBox::interval(0.0, 1.0)?)
}

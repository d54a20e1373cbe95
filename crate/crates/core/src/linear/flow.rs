use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut};
use serde::{Deserialize, Serialize};

use super::family::{LinearFamily, MatrixField};
use crate::error::{Error, Result};
use crate::ode::{integrate, SolverOptions, Trajectory};
use crate::quadrature::{integrate_vec, QuadOptions};

/// Which equation a [`MatrixTrajectory`] solves; fixes how its derivative is
/// recovered from the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowKind {
    /// `X' = A X`, `X(t0) = E`.
    Fundamental,
    /// `Z' = -Z A`, `Z(t0) = E`; `Z = X⁻¹`.
    Inverse,
    /// `Y' = A Y + Φ`, `Y(t0) = X⁰(μ)`.
    Forced,
}

/// Matrix-valued solution carried either by dense ODE output or by the
/// Cauchy formula over a fundamental matrix and its inverse.
#[derive(Clone)]
pub struct MatrixTrajectory {
    rows: usize,
    cols: usize,
    kind: FlowKind,
    mu: Vec<f64>,
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    Direct(Trajectory),
    Cauchy(Arc<CauchyForm>),
}

struct CauchyForm {
    x: MatrixTrajectory,
    z: MatrixTrajectory,
    phi: MatrixField,
    x0: DMatrix<f64>,
    mesh: Vec<f64>,
    /// `∫_{t0}^{mesh[k]} Z(s) Φ(s) ds`.
    accum: Vec<DMatrix<f64>>,
    states: Vec<DMatrix<f64>>,
    quad: QuadOptions,
}

impl fmt::Debug for MatrixTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixTrajectory")
            .field("shape", &(self.rows, self.cols))
            .field("kind", &self.kind)
            .field("mu", &self.mu)
            .field("nodes", &self.nodes().len())
            .finish()
    }
}

impl MatrixTrajectory {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nodes(&self) -> &[f64] {
        match &self.repr {
            Repr::Direct(tr) => tr.nodes(),
            Repr::Cauchy(c) => &c.mesh,
        }
    }

    pub fn span(&self) -> (f64, f64) {
        let nodes = self.nodes();
        (nodes[0], nodes[nodes.len() - 1])
    }

    pub fn state(&self, k: usize) -> DMatrix<f64> {
        match &self.repr {
            Repr::Direct(tr) => DMatrix::from_column_slice(self.rows, self.cols, tr.state(k)),
            Repr::Cauchy(c) => c.states[k].clone(),
        }
    }

    /// Largest local error estimate of the underlying integration(s).
    pub fn accuracy(&self) -> f64 {
        match &self.repr {
            Repr::Direct(tr) => tr.accuracy(),
            Repr::Cauchy(c) => c.x.accuracy().max(c.z.accuracy()),
        }
    }

    pub fn eval(&self, t: f64) -> Result<DMatrix<f64>> {
        match &self.repr {
            Repr::Direct(tr) => {
                let mut m = DMatrix::zeros(self.rows, self.cols);
                tr.eval_into(t, m.as_mut_slice())?;
                Ok(m)
            }
            Repr::Cauchy(c) => c.eval(t),
        }
    }

    /// `Y'(t)` recovered from the state through the defining equation.
    pub fn derivative(&self, fam: &LinearFamily, t: f64) -> Result<DMatrix<f64>> {
        let y = self.eval(t)?;
        let a = fam.a(t, &self.mu);
        Ok(match self.kind {
            FlowKind::Fundamental => a * y,
            FlowKind::Inverse => -(y * a),
            FlowKind::Forced => a * y + fam.phi(t, &self.mu),
        })
    }
}

impl CauchyForm {
    fn integrand(&self, s: f64, out: &mut [f64]) {
        let z = self.z.eval(s).expect("quadrature node inside span");
        let phi = (self.phi)(s, &self.x.mu);
        let (n, p) = (phi.nrows(), phi.ncols());
        DMatrixViewMut::from_slice(out, n, p).gemm(1.0, &z, &phi, 0.0);
    }

    fn piece(&self, from: f64, to: f64) -> Result<DMatrix<f64>> {
        let (n, p) = (self.x0.nrows(), self.x0.ncols());
        let (lo, hi) = self.x.span();
        let tol = self.quad.abs_tol * ((to - from).abs() / (hi - lo));
        let opts = QuadOptions { abs_tol: tol, ..self.quad };
        let v = integrate_vec(n * p, |s, out: &mut [f64]| self.integrand(s, out), from, to, &[], opts)?;
        Ok(DMatrix::from_column_slice(n, p, &v))
    }

    fn eval(&self, t: f64) -> Result<DMatrix<f64>> {
        let (lo, hi) = (self.mesh[0], self.mesh[self.mesh.len() - 1]);
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfSpan { t, lo, hi });
        }
        let k = self.mesh.partition_point(|&m| m <= t) - 1;
        if self.mesh[k] == t {
            return Ok(self.states[k].clone());
        }
        let g = &self.accum[k] + self.piece(self.mesh[k], t)?;
        Ok(self.x.eval(t)? * (&self.x0 + g))
    }
}

fn solve_matrix<F>(fam: &LinearFamily, y0: &DMatrix<f64>, tol: f64, mut rhs: F) -> Result<Trajectory>
where
    F: FnMut(f64, DMatrixView<f64>, DMatrixViewMut<f64>),
{
    let (r, c) = y0.shape();
    integrate(
        |t, y, dy| rhs(t, DMatrixView::from_slice(y, r, c), DMatrixViewMut::from_slice(dy, r, c)),
        fam.t0(),
        y0.as_slice(),
        fam.interval(),
        fam.breakpoints(),
        SolverOptions::new(tol),
    )
}

/// Fundamental matrix `X(t, μ)` normalised by `X(t0) = E`.
///
/// Fails with [`Error::SingularFlow`] when a stored state is numerically
/// singular, which for an exact flow can only come from integration error.
pub fn fundamental_matrix(fam: &LinearFamily, mu: &[f64], tol: f64) -> Result<MatrixTrajectory> {
    fam.param_box().check(mu)?;
    let n = fam.n();
    let traj = solve_matrix(fam, &DMatrix::identity(n, n), tol, |t, x, mut dx| {
        dx.gemm(1.0, &fam.a(t, mu), &x, 0.0);
    })?;
    for (k, state) in traj.states().enumerate() {
        let x = DMatrix::from_column_slice(n, n, state);
        let norm = crate::norm::matrix_norm(&x);
        let ok = x
            .try_inverse()
            .map(|inv| {
                let cond = norm * crate::norm::matrix_norm(&inv);
                cond.is_finite() && cond < 1.0 / f64::EPSILON
            })
            .unwrap_or(false);
        if !ok {
            return Err(Error::SingularFlow { t: traj.nodes()[k] });
        }
    }
    Ok(MatrixTrajectory { rows: n, cols: n, kind: FlowKind::Fundamental, mu: mu.to_vec(), repr: Repr::Direct(traj) })
}

/// `X⁻¹(t, μ)` from the adjoint equation `Z' = -Z A`, `Z(t0) = E`.
pub fn inverse_flow(fam: &LinearFamily, mu: &[f64], tol: f64) -> Result<MatrixTrajectory> {
    fam.param_box().check(mu)?;
    let n = fam.n();
    let traj = solve_matrix(fam, &DMatrix::identity(n, n), tol, |t, z, mut dz| {
        dz.gemm(-1.0, &z, &fam.a(t, mu), 0.0);
    })?;
    Ok(MatrixTrajectory { rows: n, cols: n, kind: FlowKind::Inverse, mu: mu.to_vec(), repr: Repr::Direct(traj) })
}

/// Cauchy matrix `C(t, s) = X(t) X⁻¹(s)`.
pub fn cauchy_matrix(x: &MatrixTrajectory, z: &MatrixTrajectory, t: f64, s: f64) -> Result<DMatrix<f64>> {
    Ok(x.eval(t)? * z.eval(s)?)
}

/// Direct integration of `Y' = A Y + Φ`, `Y(t0) = X⁰(μ)`.
pub fn solve_linear_direct(fam: &LinearFamily, mu: &[f64], tol: f64) -> Result<MatrixTrajectory> {
    fam.param_box().check(mu)?;
    let y0 = fam.x0(mu);
    let traj = solve_matrix(fam, &y0, tol, |t, y, mut dy| {
        dy.copy_from(&fam.phi(t, mu));
        dy.gemm(1.0, &fam.a(t, mu), &y, 1.0);
    })?;
    Ok(MatrixTrajectory {
        rows: fam.n(),
        cols: fam.p(),
        kind: FlowKind::Forced,
        mu: mu.to_vec(),
        repr: Repr::Direct(traj),
    })
}

/// Solution of the forced problem through the Cauchy formula
/// `Y(t) = X(t) X⁰ + X(t) ∫_{t0}^t X⁻¹(s) Φ(s) ds`.
///
/// The integral is accumulated across the union of both solver meshes, so
/// each quadrature panel sees a smooth integrand.
pub fn variation_of_constants(fam: &LinearFamily, mu: &[f64], tol: f64) -> Result<MatrixTrajectory> {
    let x = fundamental_matrix(fam, mu, tol)?;
    let z = inverse_flow(fam, mu, tol)?;
    variation_of_constants_with(fam, x, z, QuadOptions::default())
}

pub(crate) fn variation_of_constants_with(
    fam: &LinearFamily,
    x: MatrixTrajectory,
    z: MatrixTrajectory,
    quad: QuadOptions,
) -> Result<MatrixTrajectory> {
    let mu = x.mu.clone();
    let t0 = fam.t0();
    let mut mesh: Vec<f64> = x.nodes().iter().chain(z.nodes()).chain(fam.breakpoints()).copied().collect();
    mesh.push(t0);
    mesh.sort_by(f64::total_cmp);
    mesh.dedup();

    let (n, p) = (fam.n(), fam.p());
    let x0 = fam.x0(&mu);
    let mut form = CauchyForm {
        x,
        z,
        phi: fam.phi_field(),
        x0,
        mesh,
        accum: Vec::new(),
        states: Vec::new(),
        quad,
    };

    let k0 = form.mesh.iter().position(|&m| m == t0).expect("t0 in mesh");
    let mut accum = vec![DMatrix::zeros(n, p); form.mesh.len()];
    for k in k0 + 1..form.mesh.len() {
        accum[k] = &accum[k - 1] + form.piece(form.mesh[k - 1], form.mesh[k])?;
    }
    for k in (0..k0).rev() {
        accum[k] = &accum[k + 1] + form.piece(form.mesh[k + 1], form.mesh[k])?;
    }
    let mut states = Vec::with_capacity(accum.len());
    for (k, g) in accum.iter().enumerate() {
        states.push(form.x.eval(form.mesh[k])? * (&form.x0 + g));
    }
    form.accum = accum;
    form.states = states;

    Ok(MatrixTrajectory { rows: n, cols: p, kind: FlowKind::Forced, mu, repr: Repr::Cauchy(Arc::new(form)) })
}

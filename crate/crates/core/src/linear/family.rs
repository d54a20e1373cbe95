use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::param::ParamBox;
use crate::piecewise::ParamPiecewise;

/// `(t, μ) ↦ M(t, μ)`.
pub type MatrixField = Arc<dyn Fn(f64, &[f64]) -> DMatrix<f64> + Send + Sync>;
/// `μ ↦ M(μ)`.
pub type MatrixInit = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Linear matrix problem `Y' = A(t, μ) Y + Φ(t, μ)`, `Y(t0) = X⁰(μ)`.
///
/// `A` is `n × n`; `Φ` and `X⁰` are `n × p`. The vector problem is the
/// `p = 1` case.
#[derive(Clone)]
pub struct LinearFamily {
    n: usize,
    p: usize,
    a: MatrixField,
    phi: MatrixField,
    x0: MatrixInit,
    interval: (f64, f64),
    t0: f64,
    param_box: ParamBox,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for LinearFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearFamily")
            .field("n", &self.n)
            .field("p", &self.p)
            .field("interval", &self.interval)
            .field("t0", &self.t0)
            .field("param_box", &self.param_box)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl LinearFamily {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        p: usize,
        a: MatrixField,
        phi: MatrixField,
        x0: MatrixInit,
        interval: (f64, f64),
        t0: f64,
        param_box: ParamBox,
    ) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo < hi) || !(lo..=hi).contains(&t0) {
            return Err(Error::InvalidInterval { a: lo, b: hi });
        }
        if n == 0 || p == 0 {
            return Err(Error::InvalidArgument("linear family needs n, p >= 1".into()));
        }
        Ok(Self { n, p, a, phi, x0, interval, t0, param_box, breakpoints: Vec::new() })
    }

    /// Homogeneous family with `Φ ≡ 0` and `X⁰ ≡ E`.
    pub fn homogeneous(n: usize, a: MatrixField, interval: (f64, f64), t0: f64, param_box: ParamBox) -> Result<Self> {
        Self::new(
            n,
            n,
            a,
            Arc::new(move |_, _| DMatrix::zeros(n, n)),
            Arc::new(move |_| DMatrix::identity(n, n)),
            interval,
            t0,
            param_box,
        )
    }

    /// Family whose coefficients are piecewise polynomial tables.
    pub fn from_tables(
        a: ParamPiecewise,
        phi: ParamPiecewise,
        x0: ParamPiecewise,
        interval: (f64, f64),
        t0: f64,
        param_box: ParamBox,
    ) -> Result<Self> {
        let n = a.rows;
        let p = phi.cols;
        let m = param_box.dim();
        if a.cols != n || phi.rows != n || (x0.rows, x0.cols) != (n, p) {
            return Err(Error::InvalidArgument(format!(
                "incompatible shapes: A {}x{}, Phi {}x{}, X0 {}x{}",
                a.rows, a.cols, phi.rows, phi.cols, x0.rows, x0.cols
            )));
        }
        a.validate(m)?;
        phi.validate(m)?;
        x0.validate(m)?;
        let mut breaks = a.breakpoints();
        breaks.extend(phi.breakpoints());
        let (a, phi, x0) = (Arc::new(a), Arc::new(phi), Arc::new(x0));
        let t_ref = t0;
        Ok(Self::new(
            n,
            p,
            Arc::new(move |t, mu| a.eval(t, mu)),
            Arc::new(move |t, mu| phi.eval(t, mu)),
            Arc::new(move |mu| x0.eval(t_ref, mu)),
            interval,
            t0,
            param_box,
        )?
        .with_breakpoints(breaks))
    }

    /// Declares times where `A` or `Φ` may jump.
    pub fn with_breakpoints(mut self, mut breakpoints: Vec<f64>) -> Self {
        breakpoints.retain(|&t| t > self.interval.0 && t < self.interval.1);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        self.breakpoints = breakpoints;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns of `Φ`, `X⁰` and the solution.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn param_box(&self) -> &ParamBox {
        &self.param_box
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn a(&self, t: f64, mu: &[f64]) -> DMatrix<f64> {
        (self.a)(t, mu)
    }

    pub fn phi(&self, t: f64, mu: &[f64]) -> DMatrix<f64> {
        (self.phi)(t, mu)
    }

    pub fn x0(&self, mu: &[f64]) -> DMatrix<f64> {
        (self.x0)(mu)
    }

    pub(crate) fn phi_field(&self) -> MatrixField {
        self.phi.clone()
    }
}

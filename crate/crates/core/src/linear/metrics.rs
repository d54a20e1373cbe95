use serde::{Deserialize, Serialize};

use super::family::LinearFamily;
use super::flow::MatrixTrajectory;
use crate::error::{Error, Result};
use crate::norm::{matrix_dist, matrix_norm};
use crate::quadrature::{integrate, QuadOptions};

/// Size of the data of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormSet {
    /// `∫ ‖A(t, μ)‖ dt`.
    pub n_hat: f64,
    /// `∫ ‖Φ(t, μ)‖ dt`.
    pub phi: f64,
    /// `‖X⁰(μ)‖`.
    pub eta: f64,
    /// `‖E‖`, exactly 1 for an induced norm.
    pub xi: f64,
}

/// Integral distances between two family members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDistances {
    /// `∫ ‖A(t, μ₁) - A(t, μ₂)‖ dt`.
    pub a: f64,
    /// `∫ ‖Φ(t, μ₁) - Φ(t, μ₂)‖ dt`.
    pub f: f64,
    /// `‖X⁰(μ₁) - X⁰(μ₂)‖`.
    pub x: f64,
}

impl ParamDistances {
    pub const ZERO: Self = Self { a: 0.0, f: 0.0, x: 0.0 };
}

/// Lᵖ-type seminorms: `q`-norms of the data and `p`-distances between members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpSeminorms {
    pub n_q: f64,
    pub phi_q: f64,
    pub a_p: f64,
    pub f_p: f64,
}

fn integral<F: FnMut(f64) -> f64>(fam: &LinearFamily, f: F) -> Result<f64> {
    let (a, b) = fam.interval();
    integrate(f, a, b, fam.breakpoints(), QuadOptions::default())
}

pub fn seminorms(fam: &LinearFamily, mu: &[f64]) -> Result<SeminormSet> {
    fam.param_box().check(mu)?;
    Ok(SeminormSet {
        n_hat: integral(fam, |t| matrix_norm(&fam.a(t, mu)))?,
        phi: integral(fam, |t| matrix_norm(&fam.phi(t, mu)))?,
        eta: matrix_norm(&fam.x0(mu)),
        xi: 1.0,
    })
}

pub fn param_distances(fam: &LinearFamily, mu1: &[f64], mu2: &[f64]) -> Result<ParamDistances> {
    fam.param_box().check(mu1)?;
    fam.param_box().check(mu2)?;
    if mu1 == mu2 {
        return Ok(ParamDistances::ZERO);
    }
    Ok(ParamDistances {
        a: integral(fam, |t| matrix_dist(&fam.a(t, mu1), &fam.a(t, mu2)))?,
        f: integral(fam, |t| matrix_dist(&fam.phi(t, mu1), &fam.phi(t, mu2)))?,
        x: matrix_dist(&fam.x0(mu1), &fam.x0(mu2)),
    })
}

/// `‖Y₁(t0) - Y₂(t0)‖ + ∫ ‖Y₁'(t) - Y₂'(t)‖ dt`, the derivatives taken from the
/// defining equations of the two trajectories.
pub fn rho_metric(fam: &LinearFamily, y1: &MatrixTrajectory, y2: &MatrixTrajectory) -> Result<f64> {
    if y1.span() != y2.span() || (y1.rows(), y1.cols()) != (y2.rows(), y2.cols()) {
        return Err(Error::InvalidArgument("trajectories differ in span or shape".into()));
    }
    let t0 = fam.t0();
    let initial = matrix_dist(&y1.eval(t0)?, &y2.eval(t0)?);
    let (a, b) = y1.span();
    let mut breaks: Vec<f64> = y1.nodes().iter().chain(y2.nodes()).chain(fam.breakpoints()).copied().collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut failure = None;
    let body = integrate(
        |t| match (y1.derivative(fam, t), y2.derivative(fam, t)) {
            (Ok(d1), Ok(d2)) => matrix_dist(&d1, &d2),
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        &breaks,
        QuadOptions::default(),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(initial + body)
}

/// `(∫_a^b |f|^p dt)^{1/p}`.
pub fn lp_norm<F: FnMut(f64) -> f64>(mut f: F, p: f64, (a, b): (f64, f64), breaks: &[f64], opts: QuadOptions) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    let v = integrate(|t| f(t).abs().powf(p), a, b, breaks, opts)?;
    Ok(v.max(0.0).powf(1.0 / p))
}

/// `(n̂_q(μ₁), φ_q(μ₁), 𝔞_p(μ₁, μ₂), 𝔣_p(μ₁, μ₂))` with `1/p + 1/q = 1`.
pub fn lp_seminorms(fam: &LinearFamily, mu1: &[f64], mu2: &[f64], p: f64) -> Result<LpSeminorms> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    fam.param_box().check(mu1)?;
    fam.param_box().check(mu2)?;
    let q = p / (p - 1.0);
    let iv = fam.interval();
    let br = fam.breakpoints();
    Ok(LpSeminorms {
        n_q: lp_norm_relative(|t| matrix_norm(&fam.a(t, mu1)), q, iv, br)?,
        phi_q: lp_norm_relative(|t| matrix_norm(&fam.phi(t, mu1)), q, iv, br)?,
        a_p: lp_norm_relative(|t| matrix_dist(&fam.a(t, mu1), &fam.a(t, mu2)), p, iv, br)?,
        f_p: lp_norm_relative(|t| matrix_dist(&fam.phi(t, mu1), &fam.phi(t, mu2)), p, iv, br)?,
    })
}

/// Relative accuracy of [`lp_norm_relative`].
const LP_REL_TOL: f64 = 1e-12;

/// [`lp_norm`] with the tolerance tied to the sampled peak of `|f|^p`, so
/// scaling `f` by `c` leaves the quadrature mesh unchanged and the result
/// scales by exactly `c`.
fn lp_norm_relative<F: FnMut(f64) -> f64>(mut f: F, p: f64, (a, b): (f64, f64), breaks: &[f64]) -> Result<f64> {
    let peak = (0..=256).map(|k| f(a + (b - a) * k as f64 / 256.0).abs()).fold(0.0, f64::max);
    let scale = peak.powf(p) * (b - a);
    let opts = if scale > 0.0 { QuadOptions::with_tol(LP_REL_TOL * scale) } else { QuadOptions::default() };
    lp_norm(f, p, (a, b), breaks, opts)
}

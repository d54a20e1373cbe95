//! Closed-form a priori estimates for linear matrix problems.
//!
//! Every estimate comes in a sharp form, driven by the seminorms of the two
//! family members involved, and a coarse form driven only by the uniform
//! majorant `K`. The norm is the induced max-row-sum norm, so `‖E‖ = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{seminorms, LinearFamily, ParamDistances, SeminormSet};

/// Default factor applied to sampled seminorm suprema.
pub const DEFAULT_SAFETY: f64 = 1.25;

/// Above this `K` the coarse constants exceed ~1e20 and carry little information.
pub const K_WARN_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct BoundConstants {
    pub K: f64,
    pub K1: f64,
    pub K2: f64,
    pub K3: f64,
    pub Kt1: f64,
    pub Kt2: f64,
    pub Kt3: f64,
}

impl BoundConstants {
    /// Derived constants for a given majorant; `k` must be at least 1.
    pub fn from_k(k: f64) -> Result<Self> {
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!("majorant K must be finite and >= 1, got {k}")));
        }
        let e1 = k.exp();
        let e2 = (2.0 * k).exp();
        let e3 = (3.0 * k).exp();
        Ok(Self {
            K: k,
            K1: k * e1,
            K2: k.powi(4) * e3 * (1.0 + k + e1),
            K3: k * k * e2,
            Kt1: 1.0 + k * k * e1,
            Kt2: k * k * e1 * (1.0 + k * e1 + k.powi(3) * e2 + 2.0 * k.powi(3) * e3),
            Kt3: 1.0 + k.powi(3) * e2,
        })
    }

    pub fn is_oversized(&self) -> bool {
        self.K > K_WARN_THRESHOLD
    }
}

/// `K = safety · max(1, sup 𝔫̂, sup φ, sup η)` over the sampled parameters.
#[allow(non_snake_case)]
pub fn compute_K(fam: &LinearFamily, mu_samples: &[Vec<f64>], safety: f64) -> Result<BoundConstants> {
    if mu_samples.is_empty() {
        return Err(Error::InvalidArgument("compute_K needs at least one parameter sample".into()));
    }
    if !(safety >= 1.0) || !safety.is_finite() {
        return Err(Error::InvalidArgument(format!("safety factor must be >= 1, got {safety}")));
    }
    let mut sup = 1.0f64;
    for mu in mu_samples {
        let s = seminorms(fam, mu)?;
        sup = sup.max(s.n_hat).max(s.phi).max(s.eta);
    }
    BoundConstants::from_k(safety * sup)
}

/// Upper bounds for fundamental matrices, their inverses and Cauchy matrices.
///
/// Single-member bounds cover both members, so they use the larger seminorm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowEstimates {
    /// `sup ‖X(t, μ)‖`.
    pub x_norm: f64,
    /// `sup ‖X⁻¹(t, μ)‖`.
    pub x_inv_norm: f64,
    /// `sup ‖X(t, μ₁) - X(t, μ₂)‖`.
    pub x_diff: f64,
    /// `sup ‖X⁻¹(t, μ₁) - X⁻¹(t, μ₂)‖`.
    pub x_inv_diff: f64,
    /// `sup ‖C(t, s, μ)‖`.
    pub cauchy_norm: f64,
    /// `sup ‖C(t, s, μ₁) - C(t, s, μ₂)‖`.
    pub cauchy_diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Bounds {
    pub sharp: FlowEstimates,
    pub coarse: FlowEstimates,
}

pub fn lemma2_bounds(c: &BoundConstants, sn1: &SeminormSet, sn2: &SeminormSet, a_dist: f64) -> Lemma2Bounds {
    let xi = sn1.xi;
    let (n1, n2) = (sn1.n_hat, sn2.n_hat);
    let n = n1.max(n2);
    let diff = xi.powi(3) * (2.0 * n1 + n2).exp() * a_dist;
    let sharp = FlowEstimates {
        x_norm: xi * n.exp(),
        x_inv_norm: xi * n.exp(),
        x_diff: diff,
        x_inv_diff: diff,
        cauchy_norm: xi * xi * (2.0 * n).exp(),
        cauchy_diff: xi.powi(4) * (2.0 * n1 + n2).exp() * (n1.exp() + n2.exp()) * a_dist,
    };
    let k = c.K;
    let coarse = FlowEstimates {
        x_norm: k * k.exp(),
        x_inv_norm: k * k.exp(),
        x_diff: k.powi(3) * (3.0 * k).exp() * a_dist,
        x_inv_diff: k.powi(3) * (3.0 * k).exp() * a_dist,
        cauchy_norm: k * k * (2.0 * k).exp(),
        cauchy_diff: 2.0 * k.powi(4) * (4.0 * k).exp() * a_dist,
    };
    Lemma2Bounds { sharp, coarse }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    pub sharp: f64,
    pub coarse: f64,
}

/// Bound on `ρ(X(·, μ₁), X(·, μ₂))`.
///
/// Sharp form: `𝔫̂₁ ξ³ e^{2𝔫̂₁+𝔫̂₂} 𝔞 + ξ e^{𝔫̂₂} 𝔞`, the sum of the two integrals
/// in the derivative splitting `A₁(X₁ - X₂) + (A₁ - A₂)X₂`.
pub fn lemma3_bound(c: &BoundConstants, sn1: &SeminormSet, sn2: &SeminormSet, a_dist: f64) -> PairBound {
    let xi = sn1.xi;
    let (n1, n2) = (sn1.n_hat, sn2.n_hat);
    let k = c.K;
    PairBound {
        sharp: (n1 * xi.powi(3) * (2.0 * n1 + n2).exp() + xi * n2.exp()) * a_dist,
        coarse: (k.powi(4) * (3.0 * k).exp() + k * k.exp()) * a_dist,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Bounds {
    /// `sup ‖Y(t, μ)‖`, sharp form, covering both members.
    pub y_bound: f64,
    /// `K²e^K + K³e^{2K}`.
    pub y_bound_coarse: f64,
    /// `K₁𝔵 + K₂𝔞 + K₃𝔣`.
    pub dy_bound: f64,
    /// Seminorm form of the difference bound.
    pub dy_sharp: f64,
}

/// Bounds on the forced solution and on the difference of two members.
///
/// The sharp difference bound keeps the Cauchy-difference factor
/// `ξ⁴e^{2𝔫̂₁+𝔫̂₂}(e^{𝔫̂₁} + e^{𝔫̂₂})` on the `φ(μ₁)𝔞` term.
pub fn lemma4_bounds(c: &BoundConstants, sn1: &SeminormSet, sn2: &SeminormSet, d: &ParamDistances) -> Lemma4Bounds {
    let xi = sn1.xi;
    let single = |s: &SeminormSet| s.eta * xi * s.n_hat.exp() + xi * xi * (2.0 * s.n_hat).exp() * s.phi;
    let (n1, n2) = (sn1.n_hat, sn2.n_hat);
    let grow = (2.0 * n1 + n2).exp();
    let dy_sharp = xi * n2.exp() * d.x
        + xi.powi(3) * grow * sn1.eta * d.a
        + xi.powi(4) * grow * (n1.exp() + n2.exp()) * sn1.phi * d.a
        + xi * xi * (2.0 * n2).exp() * d.f;
    let k = c.K;
    Lemma4Bounds {
        y_bound: single(sn1).max(single(sn2)),
        y_bound_coarse: k * k * k.exp() + k.powi(3) * (2.0 * k).exp(),
        dy_bound: c.K1 * d.x + c.K2 * d.a + c.K3 * d.f,
        dy_sharp,
    }
}

/// `K̃₁𝔵 + K̃₂𝔞 + K̃₃𝔣`, a bound on `ρ(Y(·, μ₁), Y(·, μ₂))`.
pub fn lemma5_bound(c: &BoundConstants, d: &ParamDistances) -> f64 {
    c.Kt1 * d.x + c.Kt2 * d.a + c.Kt3 * d.f
}

/// Distance thresholds below which both the uniform gap and the `ρ` gap of
/// two forced solutions stay under `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaBudget {
    pub eps: f64,
    pub x_uniform: f64,
    pub a_uniform: f64,
    pub f_uniform: f64,
    pub x_rho: f64,
    pub a_rho: f64,
    pub f_rho: f64,
}

impl DeltaBudget {
    pub fn thresholds(&self) -> [f64; 6] {
        [self.x_uniform, self.a_uniform, self.f_uniform, self.x_rho, self.a_rho, self.f_rho]
    }

    /// Whether every distance sits strictly below its thresholds.
    pub fn admits(&self, d: &ParamDistances) -> bool {
        d.x < self.x_uniform.min(self.x_rho) && d.a < self.a_uniform.min(self.a_rho) && d.f < self.f_uniform.min(self.f_rho)
    }
}

pub fn theorem3_delta_budget(c: &BoundConstants, eps: f64) -> Result<DeltaBudget> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let t = |k: f64| eps / (3.0 * k);
    Ok(DeltaBudget {
        eps,
        x_uniform: t(c.K1),
        a_uniform: t(c.K2),
        f_uniform: t(c.K3),
        x_rho: t(c.Kt1),
        a_rho: t(c.Kt2),
        f_rho: t(c.Kt3),
    })
}

/// Hölder majorant `‖f‖_p ‖g‖_q` of `∫|fg|`.
pub fn holder_pair_bound(f_lp: f64, g_lq: f64) -> f64 {
    f_lp * g_lq
}

/// One bound checked against a measured value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub theoretical: f64,
    pub empirical: f64,
    pub margin: f64,
    pub mu1: Vec<f64>,
    pub mu2: Option<Vec<f64>>,
    pub passed: bool,
}

impl BoundReport {
    pub fn new(
        name: impl Into<String>,
        theoretical: f64,
        empirical: f64,
        mu1: &[f64],
        mu2: Option<&[f64]>,
        slack: f64,
    ) -> Self {
        Self {
            bound_name: name.into(),
            theoretical,
            empirical,
            margin: theoretical - empirical,
            mu1: mu1.to_vec(),
            mu2: mu2.map(<[f64]>::to_vec),
            passed: empirical <= theoretical + slack,
        }
    }
}

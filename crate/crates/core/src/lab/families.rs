use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{random_linear, LinearFamily, RandomLinearSpec, Smoothness};
use crate::ode::ParamCauchyProblem;
use crate::param::ParamBox;

/// `(t, x, μ) ↦ F(t, x, μ)`, flattened column-major when matrix valued.
pub type ParamField = Arc<dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone)]
pub enum Model {
    Nonlinear(ParamCauchyProblem),
    Linear(LinearFamily),
}

/// A catalog family with the witness pairs it registers for sampling.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub model: Model,
    pub witnesses: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Family {
    pub fn problem(&self) -> Option<&ParamCauchyProblem> {
        match &self.model {
            Model::Nonlinear(p) => Some(p),
            Model::Linear(_) => None,
        }
    }

    pub fn linear(&self) -> Option<&LinearFamily> {
        match &self.model {
            Model::Linear(f) => Some(f),
            Model::Nonlinear(_) => None,
        }
    }

    pub fn param_box(&self) -> &ParamBox {
        match &self.model {
            Model::Nonlinear(p) => p.param_box(),
            Model::Linear(f) => f.param_box(),
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match &self.model {
            Model::Nonlinear(p) => p.interval(),
            Model::Linear(f) => f.interval(),
        }
    }

    /// Dimension of the `x` slot of [`Family::field`]; zero for linear families.
    pub fn state_dim(&self) -> usize {
        match &self.model {
            Model::Nonlinear(p) => p.dim(),
            Model::Linear(_) => 0,
        }
    }

    /// The map whose equicontinuity in `μ` is at stake: the vector field of a
    /// nonlinear family, the coefficient matrix `A` of a linear one.
    pub fn field(&self) -> ParamField {
        match &self.model {
            Model::Nonlinear(p) => {
                let p = p.clone();
                Arc::new(move |t, x, mu| p.eval_rhs(t, x, mu))
            }
            Model::Linear(f) => {
                let f = f.clone();
                Arc::new(move |t, _, mu| f.a(t, mu).as_slice().to_vec())
            }
        }
    }
}

/// Optional knobs for parametrised catalog entries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyParams {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub smoothness: Option<Smoothness>,
    pub a_budget: Option<f64>,
    pub phi_budget: Option<f64>,
    pub x0_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub summary: &'static str,
}

const CATALOG: &[FamilyInfo] = &[
    FamilyInfo { name: "sin-inv", kind: "nonlinear", summary: "x' = sin(1/mu), x(0) = 0, t in [0,1], mu in (0,1)" },
    FamilyInfo { name: "mu-sin-inv", kind: "nonlinear", summary: "x' = mu sin(1/mu), x(0) = 0, t in [0,1], mu in (0,1)" },
    FamilyInfo {
        name: "mu-sin-pi",
        kind: "nonlinear",
        summary: "x' = cos(t - x) h(mu), h(mu) = mu sin(pi/mu), x(0) = 0, t in [0,1], mu in (0,1)",
    },
    FamilyInfo { name: "mu-sin-inv-x", kind: "nonlinear", summary: "x' = mu sin(1/mu) x, x(0) = 1, t in [0,1], mu in (0,1)" },
    FamilyInfo { name: "scalar-exp", kind: "linear", summary: "A = mu, Phi = 0, X0 = 1, t in [0,1], t0 = 0, mu in (-2,2)" },
    FamilyInfo { name: "nilpotent", kind: "linear", summary: "A = [[0,1],[0,0]], Phi = 0, X0 = E, t in [0,1], t0 = 0, mu in (0,1)" },
    FamilyInfo { name: "sin-inv-linear", kind: "linear", summary: "A = sin(1/mu), Phi = 0, X0 = 1, t in [0,1], t0 = 0, mu in (0,1)" },
    FamilyInfo {
        name: "random-linear",
        kind: "linear",
        summary: "seeded piecewise-polynomial A, Phi, X0 on [0,1] with integral budgets; params seed, n, smoothness",
    },
];

pub fn builtin_families() -> &'static [FamilyInfo] {
    CATALOG
}

/// Pairs `1/(πn), 1/(πn + π/2)` with gap `1` in `sin(1/μ)`, followed by
/// crest/trough pairs with gap `2`.
pub fn sin_inv_witnesses(n_max: u32) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out: Vec<(Vec<f64>, Vec<f64>)> =
        (1..=n_max).map(|n| { let n = f64::from(n); (vec![1.0 / (PI * n)], vec![1.0 / (PI * n + PI / 2.0)]) }).collect();
    out.extend((1..=n_max).map(|k| {
        let k = f64::from(k);
        (vec![1.0 / (PI / 2.0 + 2.0 * PI * k)], vec![1.0 / (1.5 * PI + 2.0 * PI * k)])
    }));
    out
}

/// Probe pairs for `h(μ) = μ sin(π/μ)`: `(1/k, 1/(k+2))`, on which `h`
/// vanishes, and `(1/k, 2/(2k+1))`, whose difference quotient is `2k`.
pub fn h_lipschitz_pairs(k_max: u32) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::new();
    for k in 2..=k_max {
        let k = f64::from(k);
        out.push((vec![1.0 / k], vec![1.0 / (k + 2.0)]));
        out.push((vec![1.0 / k], vec![2.0 / (2.0 * k + 1.0)]));
    }
    out
}

pub fn h_factor(mu: f64) -> f64 {
    mu * (PI / mu).sin()
}

fn unit_box() -> ParamBox {
    ParamBox::interval(0.0, 1.0).expect("valid box")
}

fn scalar(v: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, v)
}

pub fn sin_inv() -> ParamCauchyProblem {
    ParamCauchyProblem::new(Arc::new(|_, _, mu, dx| dx[0] = (1.0 / mu[0]).sin()), 0.0, vec![0.0], (0.0, 1.0), unit_box(), 0.0, 1.0)
        .expect("valid problem")
}

pub fn mu_sin_inv() -> ParamCauchyProblem {
    ParamCauchyProblem::new(
        Arc::new(|_, _, mu, dx| dx[0] = mu[0] * (1.0 / mu[0]).sin()),
        0.0,
        vec![0.0],
        (0.0, 1.0),
        unit_box(),
        0.0,
        1.0,
    )
    .expect("valid problem")
}

pub fn mu_sin_pi() -> ParamCauchyProblem {
    ParamCauchyProblem::new(
        Arc::new(|t, x, mu, dx| dx[0] = (t - x[0]).cos() * h_factor(mu[0])),
        0.0,
        vec![0.0],
        (0.0, 1.0),
        unit_box(),
        1.0,
        1.0,
    )
    .expect("valid problem")
}

/// `|μ sin(1/μ)| ≤ 1`, so `L = 1` and `|x| ≤ e`.
pub fn mu_sin_inv_x() -> ParamCauchyProblem {
    ParamCauchyProblem::new(
        Arc::new(|_, x, mu, dx| dx[0] = mu[0] * (1.0 / mu[0]).sin() * x[0]),
        0.0,
        vec![1.0],
        (0.0, 1.0),
        unit_box(),
        1.0,
        std::f64::consts::E,
    )
    .expect("valid problem")
}

pub fn scalar_exp() -> LinearFamily {
    LinearFamily::new(
        1,
        1,
        Arc::new(|_, mu| scalar(mu[0])),
        Arc::new(|_, _| scalar(0.0)),
        Arc::new(|_| scalar(1.0)),
        (0.0, 1.0),
        0.0,
        ParamBox::interval(-2.0, 2.0).expect("valid box"),
    )
    .expect("valid family")
}

pub fn nilpotent() -> LinearFamily {
    LinearFamily::new(
        2,
        2,
        Arc::new(|_, _| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])),
        Arc::new(|_, _| DMatrix::zeros(2, 2)),
        Arc::new(|_| DMatrix::identity(2, 2)),
        (0.0, 1.0),
        0.0,
        unit_box(),
    )
    .expect("valid family")
}

pub fn sin_inv_linear() -> LinearFamily {
    LinearFamily::new(
        1,
        1,
        Arc::new(|_, mu| scalar((1.0 / mu[0]).sin())),
        Arc::new(|_, _| scalar(0.0)),
        Arc::new(|_| scalar(1.0)),
        (0.0, 1.0),
        0.0,
        unit_box(),
    )
    .expect("valid family")
}

/// Number of witness pairs registered per family.
const WITNESS_COUNT: u32 = 200;

/// Builds a catalog family by name.
pub fn build_family(name: &str, params: &FamilyParams) -> Result<Family> {
    let (model, witnesses) = match name {
        "sin-inv" => (Model::Nonlinear(sin_inv()), sin_inv_witnesses(WITNESS_COUNT)),
        "mu-sin-inv" => (Model::Nonlinear(mu_sin_inv()), sin_inv_witnesses(WITNESS_COUNT)),
        "mu-sin-pi" => (Model::Nonlinear(mu_sin_pi()), h_lipschitz_pairs(WITNESS_COUNT)),
        "mu-sin-inv-x" => (Model::Nonlinear(mu_sin_inv_x()), sin_inv_witnesses(WITNESS_COUNT)),
        "scalar-exp" => (Model::Linear(scalar_exp()), Vec::new()),
        "nilpotent" => (Model::Linear(nilpotent()), Vec::new()),
        "sin-inv-linear" => (Model::Linear(sin_inv_linear()), sin_inv_witnesses(WITNESS_COUNT)),
        "random-linear" => {
            let mut spec = RandomLinearSpec::new(params.seed.unwrap_or(42), params.n.unwrap_or(3));
            if let Some(s) = params.smoothness {
                spec.smoothness = s;
            }
            if let Some(v) = params.a_budget {
                spec.a_budget = v;
            }
            if let Some(v) = params.phi_budget {
                spec.phi_budget = v;
            }
            if let Some(v) = params.x0_bound {
                spec.x0_bound = v;
            }
            (Model::Linear(random_linear(&spec)?), Vec::new())
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(Family { name: name.to_string(), model, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{solve_ivp, DEFAULT_TOL};

    #[test]
    fn catalog_names_build() {
        for info in builtin_families() {
            let fam = build_family(info.name, &FamilyParams::default()).unwrap();
            assert_eq!(fam.name, info.name);
            assert_eq!(fam.linear().is_some(), info.kind == "linear");
        }
        assert!(matches!(build_family("nope", &FamilyParams::default()), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn sin_inv_closed_forms() {
        let p = sin_inv();
        let tr = solve_ivp(&p, &[2.0 / PI], DEFAULT_TOL).unwrap();
        for t in [0.0, 0.25, 0.6, 1.0] {
            assert!((tr.eval(t).unwrap()[0] - t).abs() < 1e-12);
        }
        let tr = solve_ivp(&p, &[1.0 / PI], DEFAULT_TOL).unwrap();
        assert!(tr.eval(1.0).unwrap()[0].abs() <= 1e-9);
    }

    #[test]
    fn witnesses_sit_inside_box() {
        let b = unit_box();
        for (a, c) in sin_inv_witnesses(50).iter().chain(&h_lipschitz_pairs(50)) {
            assert!(b.contains(a) && b.contains(c) && a != c);
        }
    }

    #[test]
    fn h_quotient_on_probe_pairs() {
        let k = 10.0;
        let (a, b) = (1.0 / k, 2.0 / (2.0 * k + 1.0));
        let q = (h_factor(a) - h_factor(b)).abs() / (a - b).abs();
        assert!((q - 2.0 * k).abs() < 1e-9);
    }

    #[test]
    fn random_linear_is_seeded() {
        let p = FamilyParams { seed: Some(42), n: Some(3), ..FamilyParams::default() };
        let f1 = build_family("random-linear", &p).unwrap();
        let f2 = build_family("random-linear", &p).unwrap();
        let (l1, l2) = (f1.linear().unwrap(), f2.linear().unwrap());
        assert_eq!(l1.t0(), l2.t0());
        for t in [0.0, 0.3, 0.9] {
            assert_eq!(l1.a(t, &[0.4]), l2.a(t, &[0.4]));
            assert_eq!(l1.phi(t, &[0.4]), l2.phi(t, &[0.4]));
        }
    }
}

use std::f64::consts::E;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::*;
use crate::norm::matrix_dist;
use crate::param::ParamBox;

const TOL: f64 = 1e-9;

fn scalar_exp() -> LinearFamily {
    LinearFamily::new(
        1,
        1,
        Arc::new(|_, mu| DMatrix::from_element(1, 1, mu[0])),
        Arc::new(|_, _| DMatrix::zeros(1, 1)),
        Arc::new(|_| DMatrix::from_element(1, 1, 1.0)),
        (0.0, 1.0),
        0.0,
        ParamBox::interval(-2.0, 2.0).unwrap(),
    )
    .unwrap()
}

fn constant(n: usize, a: DMatrix<f64>, phi: DMatrix<f64>, x0: DMatrix<f64>) -> LinearFamily {
    let p = phi.ncols();
    LinearFamily::new(
        n,
        p,
        Arc::new(move |_, _| a.clone()),
        Arc::new(move |_, _| phi.clone()),
        Arc::new(move |_| x0.clone()),
        (0.0, 1.0),
        0.0,
        ParamBox::interval(0.0, 1.0).unwrap(),
    )
    .unwrap()
}

fn nilpotent() -> LinearFamily {
    constant(2, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]), DMatrix::zeros(2, 2), DMatrix::identity(2, 2))
}

fn scalar(v: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, v)
}

#[test]
fn fundamental_of_zero_field_is_identity() {
    let fam = constant(3, DMatrix::zeros(3, 3), DMatrix::zeros(3, 3), DMatrix::identity(3, 3));
    let x = fundamental_matrix(&fam, &[0.5], TOL).unwrap();
    for t in [0.0, 0.3, 1.0] {
        assert_eq!(x.eval(t).unwrap(), DMatrix::identity(3, 3));
    }
    let z = inverse_flow(&fam, &[0.5], TOL).unwrap();
    assert_eq!(z.eval(0.7).unwrap(), DMatrix::identity(3, 3));
    assert_eq!(cauchy_matrix(&x, &z, 0.9, 0.1).unwrap(), DMatrix::identity(3, 3));
}

#[test]
fn fundamental_starts_at_identity_exactly() {
    let fam = scalar_exp();
    let x = fundamental_matrix(&fam, &[1.3], TOL).unwrap();
    assert_eq!(x.eval(0.0).unwrap(), scalar(1.0));
}

#[test]
fn scalar_exponential_flows() {
    let fam = scalar_exp();
    let x = fundamental_matrix(&fam, &[1.0], TOL).unwrap();
    let z = inverse_flow(&fam, &[1.0], TOL).unwrap();
    assert!((x.eval(1.0).unwrap()[(0, 0)] - E).abs() < 1e-8);
    assert!((z.eval(1.0).unwrap()[(0, 0)] - 1.0 / E).abs() < 1e-8);
    let c = cauchy_matrix(&x, &z, 1.0, 0.5).unwrap();
    assert!((c[(0, 0)] - 0.5f64.exp()).abs() < 1e-8);
    let c = cauchy_matrix(&x, &z, 0.6, 0.6).unwrap();
    assert!((c[(0, 0)] - 1.0).abs() < 100.0 * TOL);
}

#[test]
fn nilpotent_flows_are_exact() {
    let fam = nilpotent();
    let x = fundamental_matrix(&fam, &[0.5], TOL).unwrap();
    let z = inverse_flow(&fam, &[0.5], TOL).unwrap();
    for t in [0.0, 0.25, 0.5, 0.875, 1.0] {
        let want = DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]);
        assert!(matrix_dist(&x.eval(t).unwrap(), &want) < 1e-12);
        let want_inv = DMatrix::from_row_slice(2, 2, &[1.0, -t, 0.0, 1.0]);
        assert!(matrix_dist(&z.eval(t).unwrap(), &want_inv) < 1e-12);
    }
}

#[test]
fn cauchy_formula_special_cases() {
    // Φ ≡ 0 reduces to X X⁰.
    let x0 = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, -1.0]);
    let a = DMatrix::from_row_slice(2, 2, &[0.1, 0.3, -0.2, 0.0]);
    let fam = constant(2, a, DMatrix::zeros(2, 2), x0.clone());
    let y = variation_of_constants(&fam, &[0.5], TOL).unwrap();
    let x = fundamental_matrix(&fam, &[0.5], TOL).unwrap();
    for t in [0.0, 0.4, 1.0] {
        assert!(matrix_dist(&y.eval(t).unwrap(), &(x.eval(t).unwrap() * &x0)) < 1e-12);
    }

    // A ≡ 0, Φ ≡ E, X⁰ ≡ 0: pure integration.
    let fam = constant(2, DMatrix::zeros(2, 2), DMatrix::identity(2, 2), DMatrix::zeros(2, 2));
    let y = variation_of_constants(&fam, &[0.5], TOL).unwrap();
    for t in [0.0, 0.33, 1.0] {
        assert!(matrix_dist(&y.eval(t).unwrap(), &(DMatrix::identity(2, 2) * t)) < 1e-12);
    }
}

#[test]
fn forced_scalar_both_routes() {
    // y' = y + 1, y(0) = 0  =>  y = e^t - 1.
    let fam = constant(1, scalar(1.0), scalar(1.0), scalar(0.0));
    let voc = variation_of_constants(&fam, &[0.5], TOL).unwrap();
    let direct = solve_linear_direct(&fam, &[0.5], TOL).unwrap();
    assert!((voc.eval(1.0).unwrap()[(0, 0)] - (E - 1.0)).abs() < 1e-8);
    assert!((direct.eval(1.0).unwrap()[(0, 0)] - (E - 1.0)).abs() < 1e-8);
    for i in 0..=40 {
        let t = i as f64 / 40.0;
        assert!(matrix_dist(&voc.eval(t).unwrap(), &direct.eval(t).unwrap()) < 1e-7);
    }
}

#[test]
fn direct_solution_cases() {
    let fam = constant(2, DMatrix::zeros(2, 2), DMatrix::zeros(2, 2), DMatrix::identity(2, 2));
    let y = solve_linear_direct(&fam, &[0.5], TOL).unwrap();
    assert_eq!(y.eval(0.8).unwrap(), DMatrix::identity(2, 2));

    let fam = LinearFamily::new(
        1,
        1,
        Arc::new(|_, mu| scalar(mu[0])),
        Arc::new(|_, _| scalar(0.0)),
        Arc::new(|_| scalar(2.0)),
        (0.0, 1.0),
        0.0,
        ParamBox::interval(-2.0, 2.0).unwrap(),
    )
    .unwrap();
    let y = solve_linear_direct(&fam, &[0.7], TOL).unwrap();
    assert!((y.eval(1.0).unwrap()[(0, 0)] - 2.0 * 0.7f64.exp()).abs() < 1e-8);
}

#[test]
fn interior_t0_cauchy_formula() {
    let fam = LinearFamily::new(
        1,
        1,
        Arc::new(|t, _| scalar(t)),
        Arc::new(|_, _| scalar(1.0)),
        Arc::new(|_| scalar(0.5)),
        (0.0, 1.0),
        0.4,
        ParamBox::interval(0.0, 1.0).unwrap(),
    )
    .unwrap();
    let voc = variation_of_constants(&fam, &[0.5], TOL).unwrap();
    let direct = solve_linear_direct(&fam, &[0.5], TOL).unwrap();
    for t in [0.0, 0.1, 0.4, 0.77, 1.0] {
        assert!(matrix_dist(&voc.eval(t).unwrap(), &direct.eval(t).unwrap()) < 1e-7, "t = {t}");
    }
}

#[test]
fn seminorm_examples() {
    let zero = constant(2, DMatrix::zeros(2, 2), DMatrix::zeros(2, 2), DMatrix::identity(2, 2));
    let s = seminorms(&zero, &[0.5]).unwrap();
    assert_eq!((s.n_hat, s.phi, s.eta, s.xi), (0.0, 0.0, 1.0, 1.0));

    let fam = scalar_exp();
    let s = seminorms(&fam, &[0.5]).unwrap();
    assert!((s.n_hat - 0.5).abs() < 1e-14);
}

#[test]
fn param_distance_examples() {
    let fam = scalar_exp();
    assert_eq!(param_distances(&fam, &[0.3], &[0.3]).unwrap(), ParamDistances::ZERO);
    let d = param_distances(&fam, &[1.0], &[0.5]).unwrap();
    assert!((d.a - 0.5).abs() < 1e-14);
    assert_eq!(d.f, 0.0);
    assert_eq!(d.x, 0.0);
    assert_eq!(param_distances(&fam, &[0.5], &[1.0]).unwrap(), d);
}

#[test]
fn rho_examples() {
    let fam = scalar_exp();
    let y1 = solve_linear_direct(&fam, &[1.0], TOL).unwrap();
    let y0 = solve_linear_direct(&fam, &[0.0], TOL).unwrap();
    assert_eq!(rho_metric(&fam, &y1, &y1).unwrap(), 0.0);
    let rho = rho_metric(&fam, &y1, &y0).unwrap();
    assert!((rho - (E - 1.0)).abs() < 1e-8, "rho = {rho}");
}

#[test]
fn lp_examples() {
    let fam = scalar_exp();
    let lp = lp_seminorms(&fam, &[1.0], &[1.0], 2.0).unwrap();
    assert_eq!((lp.a_p, lp.f_p), (0.0, 0.0));
    let lp = lp_seminorms(&fam, &[1.0], &[0.5], 2.0).unwrap();
    assert!((lp.a_p - 0.5).abs() < 1e-12);
    assert!((lp.n_q - 1.0).abs() < 1e-12);
    assert!(matches!(lp_seminorms(&fam, &[1.0], &[0.5], 1.0), Err(crate::Error::InvalidExponent(_))));
}

#[test]
fn random_family_is_reproducible_and_within_budget() {
    let spec = RandomLinearSpec::new(42, 3);
    let t1 = random_tables(&spec).unwrap();
    let t2 = random_tables(&spec).unwrap();
    assert_eq!(t1, t2);
    let fam = random_linear(&spec).unwrap();
    for mu in [0.01, 0.5, 0.99] {
        let s = seminorms(&fam, &[mu]).unwrap();
        assert!(s.n_hat <= 2.0 * 1.05 && s.phi <= 2.0 * 1.05 && s.eta <= 1.0 + 1e-12);
    }
}

use nalgebra::DMatrix;
use proptest::prelude::*;

use pfc::linear::{
    cauchy_matrix, fundamental_matrix, inverse_flow, lp_seminorms, random_linear, random_tables, rho_metric, seminorms,
    solve_linear_direct, LinearFamily, RandomLinearSpec,
};
use pfc::norm::matrix_dist;
use pfc::param::ParamBox;

const TOL: f64 = 1e-9;

fn family(seed: u64, n: usize) -> LinearFamily {
    random_linear(&RandomLinearSpec::new(seed, n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_inverse_and_cocycle(seed in any::<u64>(), n in 1usize..=3, mu in 0.01f64..0.99, ts in prop::array::uniform3(0.0f64..=1.0)) {
        let fam = family(seed, n);
        let x = fundamental_matrix(&fam, &[mu], TOL).unwrap();
        let z = inverse_flow(&fam, &[mu], TOL).unwrap();
        let e = DMatrix::identity(n, n);
        for k in 0..=64 {
            let t = k as f64 / 64.0;
            prop_assert!(matrix_dist(&(z.eval(t).unwrap() * x.eval(t).unwrap()), &e) <= 100.0 * TOL);
        }
        let [t, s, r] = ts;
        let lhs = cauchy_matrix(&x, &z, t, s).unwrap() * cauchy_matrix(&x, &z, s, r).unwrap();
        prop_assert!(matrix_dist(&lhs, &cauchy_matrix(&x, &z, t, r).unwrap()) <= 100.0 * TOL);
    }

    #[test]
    fn rho_is_a_metric(seed in any::<u64>(), mus in prop::array::uniform3(0.01f64..0.99)) {
        let fam = family(seed, 2);
        let ys: Vec<_> = mus.iter().map(|&m| solve_linear_direct(&fam, &[m], TOL).unwrap()).collect();
        let d = |i: usize, j: usize| rho_metric(&fam, &ys[i], &ys[j]).unwrap();
        for i in 0..3 {
            prop_assert_eq!(d(i, i), 0.0);
            for j in 0..3 {
                prop_assert!(d(i, j) >= 0.0);
                prop_assert!((d(i, j) - d(j, i)).abs() <= 1e-9);
                for k in 0..3 {
                    prop_assert!(d(i, k) <= d(i, j) + d(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn lp_seminorm_scales_linearly(seed in any::<u64>(), c in 1.01f64..5.0, p in 1.1f64..4.0, mus in prop::array::uniform2(0.01f64..0.99)) {
        let tables = random_tables(&RandomLinearSpec::new(seed, 2)).unwrap();
        let build = |scale: f64| {
            let mut a = tables.a.clone();
            a.terms.iter_mut().for_each(|t| t.poly.scale(scale));
            LinearFamily::from_tables(a, tables.phi.clone(), tables.x0.clone(), (0.0, 1.0), tables.t0, ParamBox::interval(0.0, 1.0).unwrap()).unwrap()
        };
        let base = lp_seminorms(&build(1.0), &[mus[0]], &[mus[1]], p).unwrap().a_p;
        let scaled = lp_seminorms(&build(c), &[mus[0]], &[mus[1]], p).unwrap().a_p;
        prop_assert!((scaled - c * base).abs() <= 1e-10 * (c * base).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn random_families_respect_budgets(seed in any::<u64>(), mu in 0.01f64..0.99) {
        let spec = RandomLinearSpec::new(seed, 3);
        let s = seminorms(&random_linear(&spec).unwrap(), &[mu]).unwrap();
        prop_assert!(s.n_hat <= spec.a_budget * 1.05);
        prop_assert!(s.phi <= spec.phi_budget * 1.05);
        prop_assert_eq!(random_tables(&spec).unwrap(), random_tables(&spec).unwrap());
    }
}

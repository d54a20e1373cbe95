use proptest::prelude::*;

use pfc::bounds::DEFAULT_SAFETY;
use pfc::lab::{
    build_family, counterexample_witness, equicontinuity_scan, verify_domination_with, DeltaLadder,
    DominationOptions, FamilyParams, PairSampler, SamplerSpec, TxGrid,
};
use pfc::linear::{random_linear, RandomLinearSpec};
use pfc::ode::lipschitz_delta;
use pfc::param::ParamBox;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn modulus_nonincreasing_along_ladder(seed in any::<u64>(), name in prop::sample::select(vec!["sin-inv", "mu-sin-pi", "mu-sin-inv"])) {
        let fam = build_family(name, &FamilyParams::default()).unwrap();
        let sampler = PairSampler::new(SamplerSpec { seed, pairs_per_rung: 32, ..SamplerSpec::default() })
            .with_witnesses(fam.witnesses.clone());
        let ladder = DeltaLadder::default_for(fam.param_box());
        let t = equicontinuity_scan(&*fam.field(), &TxGrid::default_for(&fam), &sampler, fam.param_box(), &ladder).unwrap();
        prop_assert!(t.omega.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn random_domination_never_fails(seed in any::<u64>()) {
        let fam = random_linear(&RandomLinearSpec::new(seed, 3)).unwrap();
        let pairs = PairSampler::with_seed(seed).check_pairs(fam.param_box(), 4);
        let opts = DominationOptions { safety: DEFAULT_SAFETY, ..DominationOptions::default() };
        for r in verify_domination_with(&fam, &pairs, 1e-9, &opts).unwrap() {
            prop_assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn lipschitz_delta_bounds_the_modulus(eps in 1e-3f64..0.5, seed in any::<u64>()) {
        // cos(t - x)·μ is Lipschitz in μ with M = 1.
        let field = |t: f64, x: &[f64], mu: &[f64]| vec![(t - x[0]).cos() * mu[0]];
        let delta = lipschitz_delta(eps, 1.05).unwrap();
        let ladder = DeltaLadder::new(vec![delta]).unwrap();
        let sampler = PairSampler::new(SamplerSpec { seed, pairs_per_rung: 64, ..SamplerSpec::default() });
        let grid = TxGrid::uniform((0.0, 1.0), 17, 1, (-2.0, 2.0), 5);
        let t = equicontinuity_scan(field, &grid, &sampler, &ParamBox::interval(0.0, 1.0).unwrap(), &ladder).unwrap();
        prop_assert!(t.omega[0] <= eps);
    }
}

#[test]
fn witness_gaps_persist_as_separation_shrinks() {
    for n in 1..=20 {
        let w = counterexample_witness(n).unwrap();
        assert!((w.gap - 1.0).abs() <= 10.0 * 1e-9);
        if n >= 5 {
            assert!(w.separation < 0.006);
        }
    }
}

//! Empirical continuity diagnostics: moduli of continuity over stratified
//! parameter pairs, explicit witnesses of non-uniform continuity, and
//! machine checks that measured sensitivities stay below the a priori bounds.
//!
//! Scans run in parallel over pairs; every reduction follows pool order, so
//! results depend only on the inputs and the seed.

mod domination;
mod families;
mod modulus;
mod sampler;
mod scan;
mod witness;

pub use domination::{
    budget_reports, domination_reports, measure_pair, rhs_gap_along, verify_delta_budget, verify_domination,
    verify_domination_with, verify_theorem2, verify_theorem2_measured, BudgetCheck, DominationOptions, PairMeasurement,
    CAUCHY_GRID, DOMINATION_CHECKS,
};
pub use families::{
    build_family, builtin_families, h_factor, h_lipschitz_pairs, mu_sin_inv, mu_sin_inv_x, mu_sin_pi, nilpotent,
    scalar_exp, sin_inv, sin_inv_linear, sin_inv_witnesses, Family, FamilyInfo, FamilyParams, Model, ParamField,
};
pub use modulus::{DeltaLadder, ModulusTable, Verdict, WitnessPair};
pub use sampler::{PairSampler, SampledPair, SamplerSpec, Stratum};
pub use scan::{
    equicontinuity_scan, integral_uc_scan, linear_solution_modulus, lipschitz_scan, matrix_gap, solution_modulus,
    trajectory_gap, TxGrid, SUP_GRID,
};
pub use witness::{counterexample_witness, counterexample_witness_tol, witness_separation};

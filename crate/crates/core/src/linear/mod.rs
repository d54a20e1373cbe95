//! Linear matrix problems: fundamental matrices, inverse flows, Cauchy
//! matrices, the variation-of-constants formula and the integral seminorms and
//! metrics used to measure parameter dependence.

mod family;
mod flow;
mod metrics;
mod random;

pub use family::{LinearFamily, MatrixField, MatrixInit};
pub use flow::{
    cauchy_matrix, fundamental_matrix, inverse_flow, solve_linear_direct, variation_of_constants, FlowKind,
    MatrixTrajectory,
};
pub use metrics::{lp_norm, lp_seminorms, param_distances, rho_metric, seminorms, LpSeminorms, ParamDistances, SeminormSet};
pub use random::{random_linear, random_tables, RandomLinearSpec, RandomTables, Smoothness};


pub use crate::norm::matrix_norm;

#[cfg(test)]
mod tests;

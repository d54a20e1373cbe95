// NaN must fail range checks, hence `!(x > 0.0)`; quadrature nodes are quoted to full published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bounds;
pub mod error;
pub mod lab;
pub mod linear;
pub mod norm;
pub mod ode;
pub mod param;
pub mod piecewise;
pub mod quadrature;
pub mod scenario;
pub mod suite;

pub use error::{Error, Result};

//! Special functions and quadrature used by the analytic evaluators.

mod bessel;
mod quadrature;

pub use bessel::{bessel_k0, bessel_k1};
pub(crate) use bessel::{k0_k1, x_k1};
pub use quadrature::{exp_or_zero, integrate, integrate_semi_infinite, Integral, QuadratureSettings};

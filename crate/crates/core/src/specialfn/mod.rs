//! Gamma and Bessel functions of real order.
//!
//! `J_nu` uses a power series below [`CROSSOVER`] (extended precision for the
//! upper part of that range, where the alternating series cancels) and the
//! Hankel expansion above it. The Hankel coefficients are exported because the
//! leading-order kernels are built from them.

mod bessel;
mod dd;
mod gamma;

pub use bessel::{
    bessel_j, hankel_coefficients, hankel_expansion, AsymptoticCoefficients, BesselEval, BesselMethod,
    HankelExpansion, CROSSOVER, MAX_ORDER, MIN_ORDER,
};
pub(crate) use bessel::{bessel_ratio, hankel_modulated};
pub use gamma::gamma_fn;

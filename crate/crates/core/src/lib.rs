//! Kernels and operators of Bochner-Riesz type for the scaling-critical
//! magnetic (Aharonov-Bohm) Schrodinger operator on the plane.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: flux profiles, polar points, the distances `|x-y|` and `|n_s|`
//!   and the phase analysis of `s -> |n_s|`.
//! - [`specialfn`]: Gamma and Bessel functions, including the Hankel expansion.
//! - [`quadrature`]: adaptive Gauss-Kronrod and the oscillatory `s`-integrator.
//! - [`kernels`]: spectral measure, Bochner-Riesz kernel, leading kernels,
//!   dyadic diffractive pieces, model kernels and the angular jump series.
//! - [`operator`]: polar grids, the discretised operator and a free-case oracle.
//! - [`harness`]: region geometry, ratio sweeps, scaling fits and bound suites.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod specialfn;

pub use error::{Error, Result};
pub use num_complex::Complex64;

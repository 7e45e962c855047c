//! Polar coordinates, magnetic flux profiles and the two distance functions
//! of the kernel: the free distance `|x - y|` and the diffractive family
//! `|n_s| = (r1^2 + r2^2 + 2 r1 r2 cosh s)^{1/2}`.

mod flux;
mod phase;

pub use flux::{flux_alpha, phase_integral, FluxProfile};
pub use phase::{b_param, dist_diff, morse_change, n_s_complex, DiffractivePhaseState, MorseChange};

use std::f64::consts::TAU;

use crate::error::{invalid, Result};

/// Maps an angle onto `[0, 2pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A point of the punctured plane in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(invalid(format!("radius must be finite and nonnegative, got {r}")));
        }
        if !theta.is_finite() {
            return Err(invalid("angle must be finite"));
        }
        Ok(Self { r, theta: normalize_angle(theta) })
    }

    pub fn from_cartesian(x: f64, y: f64) -> Self {
        Self { r: x.hypot(y), theta: normalize_angle(y.atan2(x)) }
    }

    pub fn to_cartesian(self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }

    /// Same point with the radius multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self { r: self.r * factor, theta: self.theta }
    }
}

/// `|x - y|` for `x = r1 e^{i theta1}`, `y = r2 e^{i theta2}` and
/// `dtheta = theta1 - theta2`.
pub fn dist_geo(r1: f64, r2: f64, dtheta: f64) -> Result<f64> {
    if !(r1 >= 0.0) || !(r2 >= 0.0) {
        return Err(invalid(format!("radii must be nonnegative, got ({r1}, {r2})")));
    }
    // (r1 - r2)^2 + 4 r1 r2 sin^2(dtheta / 2) avoids cancellation for nearby points.
    let h = (0.5 * dtheta).sin();
    Ok(((r1 - r2).powi(2) + 4.0 * r1 * r2 * h * h).sqrt())
}

//! Closed-form and quadrature-defined kernels.
//!
//! Angles enter through the difference `delta = theta1 - theta2` on
//! `(-2pi, 2pi)` plus a gauge phase built from the periodic part
//! `Phi~(theta) = Phi(theta) - alpha theta` of the antiderivative of `A`.
//! Both the geometric factor `A_alpha` and the diffractive factor `B_alpha`
//! then read `e^{i(Phi~(theta1) - Phi~(theta2))}` times a function of
//! `delta` and the total flux alone.

mod br;
mod dyadic;
mod fourier;

pub use br::{br_kernel, leading_kernels, spectral_measure_kernel, LeadingSign};
pub use dyadic::{bump_beta, bump_beta0, kd_kernel, model_kernels, DyadicPiece, ModelKernels, Symbol};
pub use fourier::{fourier_coefficient, indicator_fourier_partial, truncation_error_norm};

pub(crate) use br::{bessel_prefactor, diffractive_tail_rate};

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::geometry::{normalize_angle, FluxProfile};

pub(crate) const INV_4PI2: f64 = 1.0 / (4.0 * PI * PI);

#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    /// Signed order: `delta < 0` is the negative-order regime.
    pub delta: f64,
    pub lambda: f64,
    pub profile: FluxProfile,
    /// Absolute tolerance for the diffractive integral.
    pub tol: f64,
}

impl KernelParams {
    pub fn new(delta: f64, lambda: f64, profile: FluxProfile) -> Result<Self> {
        let p = KernelParams { delta, lambda, profile, tol: 1e-10 };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > -1.5) || !self.delta.is_finite() {
            return Err(invalid(format!("delta must exceed -3/2, got {}", self.delta)));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub geometric: Complex64,
    pub diffractive: Complex64,
}

impl KernelValue {
    pub(crate) fn new(geometric: Complex64, diffractive: Complex64, abs_error_estimate: f64) -> Self {
        KernelValue { value: geometric + diffractive, abs_error_estimate, geometric, diffractive }
    }
}

/// `e^{i(Phi~(theta1) - Phi~(theta2))}`.
pub(crate) fn gauge_phase(profile: &FluxProfile, theta1: f64, theta2: f64) -> Complex64 {
    if profile.is_constant() {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, profile.periodic_phase(theta1) - profile.periodic_phase(theta2))
}

/// Branch phase of `A_alpha` for constant flux: `alpha * delta` shifted by
/// `-2pi alpha` on `(pi, 2pi)` and by `+2pi alpha` on `[-2pi, -pi)`. The
/// closed `[0, pi]` branch wins at `|delta| = pi`.
pub(crate) fn a_reduced(alpha: f64, delta: f64) -> Complex64 {
    let shifted = if delta > PI {
        delta - TAU
    } else if delta < -PI {
        delta + TAU
    } else {
        delta
    };
    Complex64::from_polar(INV_4PI2, alpha * shifted)
}

/// `A_alpha(theta1, theta2)`: the geometric angular factor.
pub fn a_alpha(profile: &FluxProfile, theta1: f64, theta2: f64) -> Complex64 {
    let t1 = normalize_angle(theta1);
    let t2 = normalize_angle(theta2);
    gauge_phase(profile, t1, t2) * a_reduced(profile.alpha(), t1 - t2)
}

/// Half of `delta + pi` reduced to `(-pi/2, pi/2]`, snapped to exact zero and
/// `pi/2` so that the shadow line and its antipode are hit exactly.
pub(crate) fn half_shadow_angle(delta: f64) -> f64 {
    let mut phi = (delta + PI).rem_euclid(TAU);
    if phi > PI {
        phi -= TAU;
    }
    let h = 0.5 * phi;
    if h.abs() < 1e-15 {
        0.0
    } else if (h - FRAC_PI_2).abs() < 1e-15 || (h + FRAC_PI_2).abs() < 1e-15 {
        FRAC_PI_2
    } else {
        h
    }
}

/// Angle-dependent part of `B_alpha` for constant flux, continued to complex
/// `s`. Cancellation-free form of the printed expression using
/// `cosh s - cos(delta + pi) = 2 sinh^2(s/2) + 2 sin^2 h` and
/// `e^{-s} - cos(delta + pi) = expm1(-s) + 2 sin^2 h`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BCore {
    alpha: f64,
    sin_abs: f64,
    sin_alpha: f64,
    sin2h: f64,
    sn: f64,
    vanishes: bool,
}

impl BCore {
    pub fn new(alpha: f64, delta: f64) -> Self {
        let h = half_shadow_angle(delta);
        let (sh, ch) = h.sin_cos();
        let integer = (alpha - alpha.round()).abs() < 1e-12;
        BCore {
            alpha,
            sin_abs: (alpha.abs() * PI).sin(),
            sin_alpha: (alpha * PI).sin(),
            sin2h: 2.0 * sh * sh,
            sn: 2.0 * sh * ch,
            vanishes: integer,
        }
    }

    pub fn vanishes(&self) -> bool {
        self.vanishes
    }

    /// `b = sqrt(2) |sin h|`, the width of the peak at `s = 0`.
    pub fn peak_width(&self) -> f64 {
        self.sin2h.sqrt()
    }

    pub fn eval_real(&self, s: f64) -> Complex64 {
        if self.vanishes {
            return Complex64::new(0.0, 0.0);
        }
        let a = self.alpha;
        let first = self.sin_abs * (-a.abs() * s).exp();
        let shs = (0.5 * s).sinh();
        let den = 2.0 * shs * shs + self.sin2h;
        let bracket = if den == 0.0 {
            // s = 0 on the shadow line: limit of expm1(-s) sinh(as) / (2 sinh^2(s/2)).
            Complex64::new(-2.0 * a, 0.0)
        } else {
            Complex64::new((f64::exp_m1(-s) + self.sin2h) * (a * s).sinh(), -self.sn * (a * s).cosh()) / den
        };
        -INV_4PI2 * (first + self.sin_alpha * bracket)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        if s.im == 0.0 {
            return self.eval_real(s.re);
        }
        if self.vanishes {
            return Complex64::new(0.0, 0.0);
        }
        let a = self.alpha;
        let first = self.sin_abs * (-a.abs() * s).exp();
        let shs = (0.5 * s).sinh();
        let den = 2.0 * shs * shs + self.sin2h;
        let num = ((-s).exp() - 1.0 + self.sin2h) * (a * s).sinh()
            - Complex64::new(0.0, self.sn) * (a * s).cosh();
        -INV_4PI2 * (first + self.sin_alpha * num / den)
    }
}

/// `B_alpha(s, theta1, theta2)`: the diffractive angular factor.
pub fn b_alpha(profile: &FluxProfile, s: f64, theta1: f64, theta2: f64) -> Result<Complex64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(invalid(format!("s must be finite and nonnegative, got {s}")));
    }
    if profile.integer_flux().is_some() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let t1 = normalize_angle(theta1);
    let t2 = normalize_angle(theta2);
    Ok(gauge_phase(profile, t1, t2) * BCore::new(profile.alpha(), t1 - t2).eval_real(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::phase_integral;
    use std::f64::consts::FRAC_PI_4;

    /// The printed formula, evaluated naively.
    fn b_direct(alpha: f64, s: f64, delta: f64) -> Complex64 {
        let c = (delta + PI).cos();
        let sn = (delta + PI).sin();
        let frac = Complex64::new(((-s).exp() - c) * (alpha * s).sinh(), -sn * (alpha * s).cosh()) / (s.cosh() - c);
        -INV_4PI2 * ((alpha.abs() * PI).sin() * (-alpha.abs() * s).exp() + (alpha * PI).sin() * frac)
    }

    #[test]
    fn integer_flux_collapses_branches() {
        for m in [-2.0, 1.0, 3.0] {
            let p = FluxProfile::constant(m);
            for &(t1, t2) in &[(0.1, 5.0), (4.0, 0.2), (1.0, 2.0)] {
                let a = a_alpha(&p, t1, t2);
                assert!((a.norm() - INV_4PI2).abs() < 1e-15);
                let expected = Complex64::from_polar(INV_4PI2, -phase_integral(&p, t1, t2));
                assert!((a - expected).norm() < 1e-14);
                assert_eq!(b_alpha(&p, 0.7, t1, t2).unwrap(), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn free_case_is_constant() {
        let p = FluxProfile::constant(0.0);
        assert_eq!(a_alpha(&p, 0.3, 5.9), Complex64::new(INV_4PI2, 0.0));
        assert_eq!(b_alpha(&p, 2.0, 0.3, 5.9).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn half_flux_middle_branch() {
        let p = FluxProfile::constant(0.5);
        let a = a_alpha(&p, 1.5 * PI + 0.1, 0.1);
        let expected = Complex64::from_polar(INV_4PI2, -FRAC_PI_4);
        assert!((a - expected).norm() < 1e-15, "{a}");
    }

    #[test]
    fn a_alpha_is_continuous_across_the_chart_cut() {
        let p = FluxProfile::from_coefficients(0.37, &[0.2], &[0.1]).unwrap();
        let eps = 1e-9;
        let lo = a_alpha(&p, TAU - eps, 1.0);
        let hi = a_alpha(&p, 0.0, 1.0);
        assert!((lo - hi).norm() < 1e-8);
    }

    #[test]
    fn a_alpha_is_hermitian() {
        let p = FluxProfile::from_coefficients(0.3, &[0.1, -0.05], &[0.2]).unwrap();
        for &(t1, t2) in &[(0.2, 4.0), (3.0, 3.5), (6.0, 0.1), (1.0, 1.0 + PI)] {
            assert!((a_alpha(&p, t1, t2) - a_alpha(&p, t2, t1).conj()).norm() < 1e-15);
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn b_alpha_matches_high_precision_reference() {
        // Printed formula at 50 significant digits.
        let p = FluxProfile::constant(0.5);
        let v = b_alpha(&p, 1.0, 0.0, 0.0).unwrap();
        let reference = Complex64::new(-0.022_463_384_750_056_222_656_609_765_930_4, 0.0);
        assert!((v - reference).norm() < 1e-16);
        let p = FluxProfile::constant(0.3);
        let v = b_alpha(&p, 0.3, 2.0 * PI / 3.0, 0.0).unwrap();
        let reference = Complex64::new(-0.019_544_411_020_417_801_991_610_152_508, -0.032_675_247_987_989_130_485_230_210_144);
        assert!((v - reference).norm() < 1e-16, "{v}");
    }

    #[test]
    fn b_alpha_agrees_with_naive_formula_away_from_cancellation() {
        for &alpha in &[0.3, 0.5, -0.7] {
            for &s in &[0.2, 1.0, 3.0] {
                for &d in &[-5.0, -2.0, 0.0, 1.0, 2.5, 6.0] {
                    let p = FluxProfile::constant(alpha);
                    let v = BCore::new(alpha, d).eval_real(s);
                    let w = b_direct(alpha, s, d);
                    assert!((v - w).norm() < 1e-14, "alpha={alpha} s={s} d={d}");
                    let u = b_alpha(&p, s, normalize_angle(d), 0.0).unwrap();
                    assert!((u - w).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn b_alpha_removable_point() {
        let alpha = 0.5;
        let core = BCore::new(alpha, PI);
        let at0 = core.eval_real(0.0);
        let near = core.eval_real(1e-7);
        assert!((at0 - near).norm() < 1e-7);
        let limit = -INV_4PI2 * ((alpha * PI).sin() - 2.0 * alpha * (alpha * PI).sin());
        assert!((at0.re - limit).abs() < 1e-16);
    }

    #[test]
    fn b_alpha_decays_at_rate_one_half() {
        let p = FluxProfile::constant(0.5);
        let a = b_alpha(&p, 30.0, 1.0, 0.0).unwrap().norm();
        let b = b_alpha(&p, 32.0, 1.0, 0.0).unwrap().norm();
        assert!(((a / b).ln() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn complex_evaluation_continues_the_real_one() {
        let core = BCore::new(0.4, 1.3);
        let s = Complex64::new(2.0, 1e-9);
        let z = core.eval(s);
        let r = core.eval_real(2.0);
        assert!((z - r).norm() < 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn a_alpha_has_unit_modulus_times_constant(alpha in -0.99f64..0.99, t1 in 0.0f64..TAU, t2 in 0.0f64..TAU) {
            let p = FluxProfile::constant(alpha);
            proptest::prop_assert!((a_alpha(&p, t1, t2).norm() - INV_4PI2).abs() < 1e-15);
        }
    }
}

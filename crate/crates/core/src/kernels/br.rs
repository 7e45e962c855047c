use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{a_alpha, gauge_phase, BCore, KernelParams, KernelValue};
use crate::error::{Error, Result};
use crate::geometry::{dist_geo, n_s_complex, normalize_angle, PolarPoint};
use crate::quadrature::{integrate_oscillatory_s, Amplitude, OscillatorySpec, QuadResult};
use crate::specialfn::{bessel_j, bessel_ratio, hankel_coefficients};

/// `lambda^2 pi^{-delta} (2 pi)^{1 + delta}`.
pub(crate) fn bessel_prefactor(delta: f64, lambda: f64) -> f64 {
    lambda * lambda * PI.powf(-delta) * TAU.powf(1.0 + delta)
}

/// Decay rate in `s` of `|n_s|^{-power} B_alpha(s)`: `|n_s|` grows like
/// `e^{s/2}` and the two parts of `B_alpha` decay like `e^{-|alpha| s}` and
/// `e^{-(1 - |alpha|) s}`.
pub(crate) fn diffractive_tail_rate(alpha: f64, power: f64) -> f64 {
    let a = alpha.abs();
    a.min(1.0 - a).max(0.0) + 0.5 * power
}

fn check_flux(alpha: f64) -> Result<()> {
    if alpha.abs() >= 1.0 {
        return Err(Error::UnsupportedRegime(format!(
            "diffractive part needs |alpha| < 1 for non-integer flux, got {alpha}; shift A by an integer gauge first"
        )));
    }
    Ok(())
}

/// `scale * int_0^inf (lambda|n_s|)^{-order} J_order(lambda|n_s|) B_core(s) ds`.
#[allow(clippy::too_many_arguments)]
fn diffractive_integral(
    alpha: f64,
    lambda: f64,
    r1: f64,
    r2: f64,
    delta_angle: f64,
    order: f64,
    power: f64,
    scale: f64,
    tol: f64,
) -> Result<QuadResult> {
    let core = BCore::new(alpha, delta_angle);
    if core.vanishes() {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, evaluations: 0, converged: true });
    }
    check_flux(alpha)?;
    let weight = move |s: Complex64| core.eval(s) * scale;
    let b = core.peak_width();
    let spec = OscillatorySpec {
        lambda,
        r1,
        r2,
        amplitude: Amplitude::Bessel { order, weight: &weight },
        tail_rate: diffractive_tail_rate(alpha, power),
        peak_width: (b > 0.0).then_some(b.min(2.0)),
    };
    integrate_oscillatory_s(&spec, tol)
}

fn polar_separation(x: PolarPoint, y: PolarPoint) -> Result<(f64, f64)> {
    let t1 = normalize_angle(x.theta);
    let t2 = normalize_angle(y.theta);
    Ok((t1 - t2, dist_geo(x.r, y.r, t1 - t2)?))
}

/// Kernel of the spectral measure `dE(lambda; x, y)`.
pub fn spectral_measure_kernel(params: &KernelParams, x: PolarPoint, y: PolarPoint) -> Result<KernelValue> {
    params.validate()?;
    let (dth, d) = polar_separation(x, y)?;
    let lam = params.lambda;
    let j0 = bessel_j(0.0, lam * d)?;
    let a = a_alpha(&params.profile, x.theta, y.theta);
    let scale = lam / PI * TAU;
    let geometric = scale * j0.value * a;
    let geo_err = scale * j0.abs_error_estimate * a.norm();
    let diff = diffractive_integral(params.profile.alpha(), lam, x.r, y.r, dth, 0.0, 0.5, scale, params.tol)?;
    let phase = gauge_phase(&params.profile, x.theta, y.theta);
    Ok(KernelValue::new(geometric, phase * diff.value, geo_err + diff.abs_error_estimate))
}

/// Kernel of `(1 - L_A / lambda^2)^delta_+`, defined for `delta > -3/2` by its
/// Bessel closed form.
pub fn br_kernel(params: &KernelParams, x: PolarPoint, y: PolarPoint) -> Result<KernelValue> {
    params.validate()?;
    let (dth, d) = polar_separation(x, y)?;
    if d == 0.0 && params.delta < 0.0 {
        return Err(Error::SingularInput("x = y: the kernel is evaluated off the diagonal only".into()));
    }
    let lam = params.lambda;
    let nu = 1.0 + params.delta;
    let pref = bessel_prefactor(params.delta, lam);
    let (ratio, ratio_err) = bessel_ratio(nu, lam * d);
    let a = a_alpha(&params.profile, x.theta, y.theta);
    let geometric = pref * ratio * a;
    let geo_err = pref * ratio_err * a.norm();
    let diff = diffractive_integral(
        params.profile.alpha(),
        lam,
        x.r,
        y.r,
        dth,
        nu,
        1.5 + params.delta,
        pref,
        params.tol,
    )?;
    let phase = gauge_phase(&params.profile, x.theta, y.theta);
    Ok(KernelValue::new(geometric, phase * diff.value, geo_err + diff.abs_error_estimate))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeadingSign {
    Plus,
    Minus,
}

impl LeadingSign {
    fn sigma(self) -> f64 {
        match self {
            LeadingSign::Plus => 1.0,
            LeadingSign::Minus => -1.0,
        }
    }
}

/// Leading-order pieces `G^+-` (geometric) and `D^+-` (diffractive): the
/// Bessel factor is replaced by the first term of its Hankel expansion,
/// `a^0_+- e^{+-iz} (1 + z)^{-3/2 - delta}`, with `z = lambda |x - y|` or
/// `lambda |n_s|`.
pub fn leading_kernels(params: &KernelParams, sign: LeadingSign, x: PolarPoint, y: PolarPoint) -> Result<KernelValue> {
    params.validate()?;
    let (dth, d) = polar_separation(x, y)?;
    let lam = params.lambda;
    let nu = 1.0 + params.delta;
    let power = 1.5 + params.delta;
    let coeffs = hankel_coefficients(nu, 1);
    let sigma = sign.sigma();
    let a0 = match sign {
        LeadingSign::Plus => coeffs.coeffs_plus[0],
        LeadingSign::Minus => coeffs.coeffs_minus[0],
    };
    let pref = bessel_prefactor(params.delta, lam);
    let z = lam * d;
    let geometric =
        pref * a0 * Complex64::from_polar((1.0 + z).powf(-power), sigma * z) * a_alpha(&params.profile, x.theta, y.theta);

    let alpha = params.profile.alpha();
    let core = BCore::new(alpha, dth);
    if core.vanishes() {
        return Ok(KernelValue::new(geometric, Complex64::new(0.0, 0.0), 0.0));
    }
    check_flux(alpha)?;
    let (r1, r2) = (x.r, y.r);
    let amp = move |s: Complex64| {
        let n = n_s_complex(r1, r2, s);
        (1.0 + lam * n).powf(-power) * core.eval(s) * pref * a0
    };
    // e^{-i lambda n} psi = conj(e^{i lambda n} conj(psi(conj s))) on the real axis.
    let conj_amp = move |s: Complex64| amp(s.conj()).conj();
    let b = core.peak_width();
    let spec = OscillatorySpec {
        lambda: lam,
        r1,
        r2,
        amplitude: Amplitude::Plain(if sigma > 0.0 { &amp } else { &conj_amp }),
        tail_rate: diffractive_tail_rate(alpha, power),
        peak_width: (b > 0.0).then_some(b.min(2.0)),
    };
    let q = integrate_oscillatory_s(&spec, params.tol)?;
    let v = if sigma > 0.0 { q.value } else { q.value.conj() };
    let phase = gauge_phase(&params.profile, x.theta, y.theta);
    Ok(KernelValue::new(geometric, phase * v, q.abs_error_estimate))
}

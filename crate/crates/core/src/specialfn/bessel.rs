use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::dd::Dd;
use super::gamma::rgamma;
use crate::error::{invalid, Error, Result};

/// Series below, Hankel expansion above.
pub const CROSSOVER: f64 = 18.0;
/// Orders accepted by [`bessel_j`]. The kernels need `[-1/2, 1)`; the
/// three-term recurrence checks reach one unit further on either side.
pub const MIN_ORDER: f64 = -1.0;
pub const MAX_ORDER: f64 = 3.0;

/// Above this argument the plain double series loses more than ~1e-13 to
/// cancellation, so the extended-precision path takes over.
const DD_THRESHOLD: f64 = 10.0;
const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselMethod {
    Series,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: f64,
    pub argument: f64,
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: BesselMethod,
}

fn negative_integer(nu: f64) -> Option<u32> {
    (nu < 0.0 && nu == nu.round()).then_some((-nu) as u32)
}

/// `J_nu(r)` for real order in `[MIN_ORDER, MAX_ORDER]` and `r >= 0`.
pub fn bessel_j(nu: f64, r: f64) -> Result<BesselEval> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&nu) {
        return Err(invalid(format!("Bessel order {nu} outside [{MIN_ORDER}, {MAX_ORDER}]")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite and nonnegative, got {r}")));
    }
    if let Some(n) = negative_integer(nu) {
        let mut e = bessel_j(n as f64, r)?;
        if n % 2 == 1 {
            e.value = -e.value;
        }
        e.order = nu;
        return Ok(e);
    }
    if r == 0.0 {
        if nu < 0.0 {
            return Err(Error::Domain(format!("J_{nu} is unbounded at 0")));
        }
        let value = if nu == 0.0 { 1.0 } else { 0.0 };
        return Ok(BesselEval { order: nu, argument: r, value, abs_error_estimate: EPS, method: BesselMethod::Series });
    }
    if r <= CROSSOVER {
        let (ratio, err) = series_ratio(nu, r);
        let scale = r.powf(nu);
        Ok(BesselEval {
            order: nu,
            argument: r,
            value: ratio * scale,
            abs_error_estimate: (err * scale).max(EPS * (ratio * scale).abs()).max(f64::MIN_POSITIVE),
            method: BesselMethod::Series,
        })
    } else {
        let (value, err) = asymptotic_j(nu, r);
        Ok(BesselEval { order: nu, argument: r, value, abs_error_estimate: err, method: BesselMethod::Asymptotic })
    }
}

/// `z^{-nu} J_nu(z)` and an absolute error estimate; regular at `z = 0`.
pub(crate) fn bessel_ratio(nu: f64, z: f64) -> (f64, f64) {
    if let Some(n) = negative_integer(nu) {
        // z^{n} J_{-n}(z) = (-1)^n z^{2n} (z^{-n} J_n(z))
        let (v, e) = bessel_ratio(n as f64, z);
        let f = z.powi(2 * n as i32);
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        return (sign * v * f, e * f);
    }
    if z <= CROSSOVER {
        series_ratio(nu, z)
    } else {
        let (v, e) = asymptotic_j(nu, z);
        let s = z.powf(-nu);
        (v * s, e * s)
    }
}

/// Power series of `z^{-nu} J_nu(z) = 2^{-nu} sum_m (-z^2/4)^m / (m! Gamma(nu+m+1))`.
fn series_ratio(nu: f64, z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let pref = 2f64.powf(-nu) * rgamma(nu + 1.0);
    if q == 0.0 {
        return (pref, EPS * pref.abs());
    }
    if z <= DD_THRESHOLD {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut abs_sum = 1.0;
        let mut m = 0.0;
        loop {
            m += 1.0;
            term *= -q / (m * (nu + m));
            sum += term;
            abs_sum += term.abs();
            if m > q && term.abs() < 1e-17 * sum.abs().max(1e-300) || m > 300.0 {
                break;
            }
        }
        let v = pref * sum;
        let err = pref.abs() * (4.0 * EPS * abs_sum + term.abs());
        (v, err)
    } else {
        let half = Dd::from_f64(0.5 * z);
        let mq = half.mul(half).neg();
        let nu_dd = Dd::from_f64(nu);
        let mut term = Dd::from_f64(1.0);
        let mut sum = term;
        let mut m = 0.0;
        loop {
            m += 1.0;
            let md = Dd::from_f64(m);
            term = term.mul(mq).div(md.mul(nu_dd.add(md)));
            sum = sum.add(term);
            if m > q && term.hi.abs() < 1e-20 * sum.hi.abs().max(1e-300) || m > 300.0 {
                break;
            }
        }
        let v = pref * sum.to_f64();
        let err = 8.0 * EPS * v.abs() + pref.abs() * term.hi.abs() + 1e-28 * pref.abs();
        (v, err.max(EPS * EPS))
    }
}

/// Hankel coefficient `a_k(nu) = prod_{i<=k} (4 nu^2 - (2i-1)^2) / (k! 8^k)`.
fn hankel_a(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    (1..=k).fold(1.0, |a, i| a * (mu - ((2 * i - 1) as f64).powi(2)) / (8.0 * i as f64))
}

const MAX_HANKEL_TERMS: usize = 60;

/// `J_nu(z) = sqrt(2/(pi z)) (P cos chi - Q sin chi)`, summed to the smallest term.
fn asymptotic_j(nu: f64, z: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut qsum = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    let mut omitted = 0.0;
    for k in 0..MAX_HANKEL_TERMS {
        if k > 0 {
            a *= (mu - ((2 * k - 1) as f64).powi(2)) / (8.0 * k as f64 * z);
        }
        let mag = a.abs();
        if mag > prev {
            omitted = prev;
            break;
        }
        // i^k pattern: k mod 4 = 0 -> +P, 1 -> +Q, 2 -> -P, 3 -> -Q
        match k % 4 {
            0 => p += a,
            1 => qsum += a,
            2 => p -= a,
            _ => qsum -= a,
        }
        omitted = mag;
        if mag < 1e-17 * p.abs().max(1e-3) {
            break;
        }
        prev = mag;
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    let amp = (2.0 / (PI * z)).sqrt();
    let value = amp * (p * chi.cos() - qsum * chi.sin());
    let err = amp * (omitted + 4.0 * EPS * (1.0 + z * EPS)) + EPS * value.abs();
    (value, err)
}

/// `H^{(1)}_nu(z) e^{-iz}` (`sign > 0`) or `H^{(2)}_nu(z) e^{iz}` (`sign < 0`)
/// from the Hankel expansion; intended for `|z| >~ 25`, `|arg z| < pi/2`.
pub(crate) fn hankel_modulated(nu: f64, z: Complex64, sign: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let rot = Complex64::new(0.0, sign);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..MAX_HANKEL_TERMS {
        term = term * rot * ((mu - ((2 * k - 1) as f64).powi(2)) / (8.0 * k as f64)) / z;
        let mag = term.norm();
        if mag > prev {
            break;
        }
        sum += term;
        if mag < 1e-17 {
            break;
        }
        prev = mag;
    }
    let chi0 = (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * Complex64::from_polar(1.0, -sign * chi0) * sum
}

/// Coefficients `a^j_pm` with `J_nu(r) ~ r^{-1/2} (e^{ir} sum a^j_+ r^{-j} + e^{-ir} sum a^j_- r^{-j})`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCoefficients {
    pub order: f64,
    pub coeffs_plus: Vec<Complex64>,
    pub coeffs_minus: Vec<Complex64>,
}

pub fn hankel_coefficients(nu: f64, count: usize) -> AsymptoticCoefficients {
    let base = (0.5 / PI).sqrt() * Complex64::from_polar(1.0, -(0.5 * nu * PI + FRAC_PI_4));
    let coeffs_plus: Vec<Complex64> = (0..count)
        .map(|j| base * Complex64::from_polar(1.0, j as f64 * FRAC_PI_2) * hankel_a(nu, j))
        .collect();
    let coeffs_minus = coeffs_plus.iter().map(|c| c.conj()).collect();
    AsymptoticCoefficients { order: nu, coeffs_plus, coeffs_minus }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelExpansion {
    pub value: f64,
    /// Magnitude of the first omitted pair of terms.
    pub abs_error_bound: f64,
    pub coeffs: AsymptoticCoefficients,
}

/// Truncated two-exponential expansion with `terms` coefficients per branch.
pub fn hankel_expansion(nu: f64, r: f64, terms: usize) -> Result<HankelExpansion> {
    if !(1..=8).contains(&terms) {
        return Err(invalid(format!("terms must be in 1..=8, got {terms}")));
    }
    if !(r >= CROSSOVER) || !r.is_finite() {
        return Err(Error::Precondition(format!("Hankel expansion needs r >= {CROSSOVER}, got {r}")));
    }
    let coeffs = hankel_coefficients(nu, terms);
    let e = Complex64::from_polar(1.0, r);
    let value = coeffs
        .coeffs_plus
        .iter()
        .enumerate()
        .map(|(j, a)| 2.0 * (a * e).re * r.powf(-0.5 - j as f64))
        .sum();
    let next = hankel_coefficients(nu, terms + 1).coeffs_plus[terms];
    let abs_error_bound = 2.0 * next.norm() * r.powf(-0.5 - terms as f64);
    Ok(HankelExpansion { value, abs_error_bound, coeffs })
}

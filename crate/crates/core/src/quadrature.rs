//! One-dimensional integration.
//!
//! [`integrate_adaptive`] is a globally adaptive Gauss-Kronrod (7/15) rule.
//! [`integrate_oscillatory_s`] handles integrals of the form
//! `int_0^inf e^{i lambda |n_s|} psi(s) ds`, where the phase grows like
//! `e^{s/2}` and the amplitude decays exponentially. The real axis is split
//! into oscillation-capped panels up to a cut `S`; beyond it the path is
//! turned into the complex plane, where the phase factor decays
//! super-exponentially.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist_diff, n_s_complex};
use crate::specialfn::{bessel_ratio, hankel_modulated};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, evaluations: 0, converged: true }
    }

    fn absorb(&mut self, other: QuadResult) {
        self.value += other.value;
        self.abs_error_estimate += other.abs_error_estimate;
        self.evaluations += other.evaluations;
        self.converged &= other.converged;
    }
}

pub(crate) const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
pub(crate) const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
pub(crate) const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 Kronrod abscissae on `[a, b]` with Kronrod and Gauss weights
/// (Gauss weight zero at the Kronrod-only nodes).
pub(crate) fn gk15_rule(a: f64, b: f64) -> [(f64, f64, f64); 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0, 0.0); 15];
    for i in 0..7 {
        let g = if i % 2 == 1 { G_WEIGHTS[i / 2] * h } else { 0.0 };
        out[2 * i] = (c - h * GK_NODES[i], GK_WEIGHTS[i] * h, g);
        out[2 * i + 1] = (c + h * GK_NODES[i], GK_WEIGHTS[i] * h, g);
    }
    out[14] = (c, GK_WEIGHTS[7] * h, G_WEIGHTS[3] * h);
    out
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for (x, wk, wg) in gk15_rule(a, b) {
        let v = f(x);
        k += v * wk;
        g += v * wg;
    }
    (k, (k - g).norm())
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration on the
/// three-term recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub const DEFAULT_BUDGET: usize = 400_000;

/// Adaptive bisection until every accepted interval satisfies
/// `|K15 - G7| <= tol * len / (b - a)`.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    integrate_adaptive_budget(f, a, b, tol, DEFAULT_BUDGET)
}

/// As [`integrate_adaptive`] with an explicit cap on integrand evaluations.
/// Running out of budget is not an error: the result is flagged unconverged.
pub fn integrate_adaptive_budget<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("need finite a < b, got [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let total = b - a;
    let mut out = QuadResult::zero();
    let mut stack = vec![(a, b)];
    while let Some((lo, hi)) = stack.pop() {
        let (v, e) = gk15(&f, lo, hi);
        out.evaluations += 15;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Domain(format!("integrand not finite on [{lo}, {hi}]")));
        }
        let allowed = tol * (hi - lo) / total;
        let mid = 0.5 * (lo + hi);
        let splittable = mid > lo && mid < hi && (hi - lo) > 1e-15 * total;
        if e <= allowed || !splittable || out.evaluations + 30 * (stack.len() + 1) > budget {
            if e > allowed {
                out.converged = false;
            }
            out.value += v;
            out.abs_error_estimate += e;
        } else {
            // Push the right half first so the left half is summed first.
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Ok(out)
}

/// How the amplitude enters the oscillatory integral.
#[derive(Clone, Copy)]
pub enum Amplitude<'a> {
    /// Integrand `e^{i lambda |n_s|} psi(s)`; `psi` must be analytic in
    /// `0 < Im s < pi/2` to the right of the real-axis cut.
    Plain(&'a (dyn Fn(Complex64) -> Complex64 + Sync)),
    /// Integrand `(lambda |n_s|)^{-order} J_order(lambda |n_s|) w(s)`.
    Bessel { order: f64, weight: &'a (dyn Fn(Complex64) -> Complex64 + Sync) },
}

#[derive(Clone, Copy)]
pub struct OscillatorySpec<'a> {
    pub lambda: f64,
    pub r1: f64,
    pub r2: f64,
    pub amplitude: Amplitude<'a>,
    /// Exponential decay rate of the amplitude as `s -> inf`.
    pub tail_rate: f64,
    /// Width of an amplitude peak at `s = 0`, if any.
    pub peak_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryOptions {
    /// Multiplies the contour cut `S` (or the truncation point). Values above
    /// one are used to test that the tail treatment is sound.
    pub cut_scale: f64,
    /// Turn the path into the complex plane beyond `S`. When off, the real
    /// axis is integrated up to `s_max` and the analytic tail bound is added.
    pub contour: bool,
    pub budget: usize,
}

impl Default for OscillatoryOptions {
    fn default() -> Self {
        OscillatoryOptions { cut_scale: 1.0, contour: true, budget: 4_000_000 }
    }
}

/// `lambda * Im |n_s|` at the top of the contour segment must exceed this.
const CONTOUR_DECAY: f64 = 36.0;
/// `lambda |n_S|` must exceed this so the Hankel expansion is accurate on
/// the contour.
const CONTOUR_MIN_ARG: f64 = 30.0;
const MIN_CUT: f64 = 1.0;

/// Panel breakpoints on the real axis and the treatment beyond the last one.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layout {
    pub breaks: Vec<f64>,
    /// `Some(S)` when the tail is taken along `S + i tau`, `|tau| <= pi/2`.
    pub contour_at: Option<f64>,
}

pub(crate) fn s_max(tail_rate: f64, tol: f64) -> f64 {
    (10.0 / tol).ln().max(0.0) / tail_rate
}

fn contour_cut(lambda: f64, r1: f64, r2: f64) -> f64 {
    let ok = |s: f64| {
        let top = n_s_complex(r1, r2, Complex64::new(s, FRAC_PI_2));
        lambda * top.im >= CONTOUR_DECAY && lambda * n_s_complex(r1, r2, Complex64::new(s, 0.0)).re >= CONTOUR_MIN_ARG
    };
    // Amplitude poles may sit on the imaginary axis; keep the vertical
    // segment at distance >= MIN_CUT from it.
    let mut lo = MIN_CUT;
    if ok(lo) {
        return lo;
    }
    let mut hi = 2.0 * lo;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e4 {
            return f64::INFINITY;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Resolution floor near `s = 0`: the amplitude peak and the stationary-phase
/// width `((r1 + r2) / (lambda r1 r2))^{1/2}` of `|n_s| - (r1 + r2)`.
pub(crate) fn near_origin_floor(lambda: f64, r1: f64, r2: f64, peak_width: Option<f64>) -> f64 {
    let stat = ((r1 + r2) / (lambda * r1 * r2)).sqrt();
    let w = match peak_width {
        Some(b) if b > 0.0 => b.min(stat),
        _ => stat,
    };
    (w / 8.0).min(0.125)
}

pub(crate) fn layout(
    lambda: f64,
    r1: f64,
    r2: f64,
    tail_rate: f64,
    peak_width: Option<f64>,
    tol: f64,
    opts: &OscillatoryOptions,
) -> Layout {
    let smax = s_max(tail_rate, tol).max(5.0);
    let cut = if opts.contour { contour_cut(lambda, r1, r2) } else { f64::INFINITY };
    let (end, contour_at) = if cut.is_finite() && cut <= smax {
        let s = (cut * opts.cut_scale).max(cut);
        (s, Some(s))
    } else {
        (smax * opts.cut_scale, None)
    };
    let mut breaks = vec![0.0];
    if end <= 0.0 {
        return Layout { breaks: vec![0.0], contour_at };
    }
    let floor = near_origin_floor(lambda, r1, r2, peak_width);
    let mut x = floor;
    // Geometric grading away from the origin.
    while x < end {
        let cap = panel_cap(lambda, r1, r2, x);
        let last = *breaks.last().unwrap();
        if x - last >= cap {
            break;
        }
        breaks.push(x);
        x *= 2.0;
    }
    loop {
        let last = *breaks.last().unwrap();
        if last >= end {
            break;
        }
        let mut w = panel_cap(lambda, r1, r2, last);
        // The derivative grows along the panel; shrink until the cap at the
        // right end is respected too.
        while w > 1e-12 && w > panel_cap(lambda, r1, r2, (last + w).min(end)) {
            w *= 0.75;
        }
        let next = (last + w).min(end);
        breaks.push(if end - next < 1e-3 * w { end } else { next });
    }
    Layout { breaks, contour_at }
}

/// At most half an oscillation: `pi / (lambda d1)`, and never wider than one.
fn panel_cap(lambda: f64, r1: f64, r2: f64, s: f64) -> f64 {
    let d1 = dist_diff(r1, r2, s.max(0.0)).map(|st| st.d1).unwrap_or(0.0);
    if d1 * lambda <= 0.0 {
        1.0
    } else {
        (std::f64::consts::PI / (lambda * d1)).min(1.0)
    }
}

/// Integrand on the real axis.
pub(crate) fn real_integrand(spec: &OscillatorySpec<'_>, s: f64) -> Complex64 {
    let n = dist_diff(spec.r1, spec.r2, s).map(|st| st.value).unwrap_or(spec.r1 + spec.r2);
    match spec.amplitude {
        Amplitude::Plain(psi) => Complex64::from_polar(1.0, spec.lambda * n) * psi(Complex64::new(s, 0.0)),
        Amplitude::Bessel { order, weight } => bessel_ratio(order, spec.lambda * n).0 * weight(Complex64::new(s, 0.0)),
    }
}

/// Integrand along `S + i sigma tau`, including the factor `ds/dtau = i sigma`.
/// For the Bessel kind only the matching Hankel half is returned.
pub(crate) fn contour_integrand(spec: &OscillatorySpec<'_>, cut: f64, sigma: f64, tau: f64) -> Complex64 {
    let s = Complex64::new(cut, sigma * tau);
    let n = n_s_complex(spec.r1, spec.r2, s);
    let z = spec.lambda * n;
    let ds = Complex64::new(0.0, sigma);
    let osc = (Complex64::new(0.0, sigma) * z).exp();
    match spec.amplitude {
        Amplitude::Plain(psi) => osc * psi(s) * ds,
        Amplitude::Bessel { order, weight } => {
            0.5 * z.powf(-order) * osc * hankel_modulated(order, z, sigma) * weight(s) * ds
        }
    }
}

/// Crude bound on `int_S^inf |integrand|` from the value at `S` and the decay rate.
fn tail_bound(spec: &OscillatorySpec<'_>, at: f64) -> f64 {
    let s = Complex64::new(at, 0.0);
    let amp = match spec.amplitude {
        Amplitude::Plain(psi) => psi(s).norm(),
        Amplitude::Bessel { order, weight } => {
            let z = spec.lambda * n_s_complex(spec.r1, spec.r2, s).re;
            weight(s).norm() * z.powf(-order).max(bessel_ratio(order, 0.0).0.abs()).max(1.0)
        }
    };
    amp / spec.tail_rate
}

fn validate(spec: &OscillatorySpec<'_>, tol: f64) -> Result<()> {
    if !(spec.tail_rate > 0.0) || !spec.tail_rate.is_finite() {
        return Err(Error::Precondition(format!("tail_rate must be positive, got {}", spec.tail_rate)));
    }
    if !(spec.lambda > 0.0) || !spec.lambda.is_finite() {
        return Err(invalid(format!("lambda must be positive, got {}", spec.lambda)));
    }
    if !(spec.r1 > 0.0 && spec.r2 > 0.0) {
        return Err(invalid(format!("radii must be positive, got ({}, {})", spec.r1, spec.r2)));
    }
    if let Some(b) = spec.peak_width {
        if !(b > 0.0 && b <= 2.0) {
            return Err(invalid(format!("peak_width must lie in (0, 2], got {b}")));
        }
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// `int_0^inf` of the integrand described by `spec`, to absolute tolerance `tol`.
pub fn integrate_oscillatory_s(spec: &OscillatorySpec<'_>, tol: f64) -> Result<QuadResult> {
    integrate_oscillatory_s_with(spec, tol, &OscillatoryOptions::default())
}

pub fn integrate_oscillatory_s_with(
    spec: &OscillatorySpec<'_>,
    tol: f64,
    opts: &OscillatoryOptions,
) -> Result<QuadResult> {
    validate(spec, tol)?;
    let lay = layout(spec.lambda, spec.r1, spec.r2, spec.tail_rate, spec.peak_width, tol, opts);
    let end = *lay.breaks.last().unwrap();
    let real_tol = 0.5 * tol;
    let mut out = QuadResult::zero();
    let per_panel_budget = (opts.budget / lay.breaks.len().max(2)).max(10_000);
    for w in lay.breaks.windows(2) {
        let share = real_tol * (w[1] - w[0]) / end;
        let r = integrate_adaptive_budget(|s| real_integrand(spec, s), w[0], w[1], share, per_panel_budget)?;
        out.absorb(r);
    }
    match lay.contour_at {
        Some(cut) => {
            let sigmas: &[f64] = match spec.amplitude {
                Amplitude::Plain(_) => &[1.0],
                Amplitude::Bessel { .. } => &[1.0, -1.0],
            };
            for &sigma in sigmas {
                let share = 0.25 * tol;
                let r = integrate_adaptive_budget(
                    |t| contour_integrand(spec, cut, sigma, t),
                    0.0,
                    FRAC_PI_2,
                    share,
                    per_panel_budget,
                )?;
                out.absorb(r);
                // Remaining horizontal ray at Im s = sigma pi/2.
                let top = Complex64::new(cut, sigma * FRAC_PI_2);
                let decay = (-spec.lambda * n_s_complex(spec.r1, spec.r2, top).im.abs()).exp();
                out.abs_error_estimate += decay * tail_bound(spec, cut).max(1.0) * 4.0;
            }
        }
        None => {
            out.abs_error_estimate += tail_bound(spec, end);
        }
    }
    if out.abs_error_estimate > tol {
        out.converged = false;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(20);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m38: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m38 - 2.0 / 39.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(1);
        assert_eq!((x[0], w[0]), (0.0, 2.0));
    }

    #[test]
    fn constant_is_exact() {
        let r = integrate_adaptive(|_| c(1.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-15);
        assert!(r.converged);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn sine_integral() {
        let r = integrate_adaptive(|s| c(s.sin()), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-12);
        assert!(r.abs_error_estimate <= 1e-12);
    }

    #[test]
    fn narrow_peak_against_arctan() {
        let b: f64 = 1e-3;
        let k = b * 2f64.sqrt();
        // int_0^1 ds / (s^2/2 + b^2) = (2/k) atan(1/k) with k = b sqrt(2)
        let exact = 2.0 / k * (1.0 / k).atan();
        let tol = 1e-8;
        let r = integrate_adaptive(|s| c(1.0 / (0.5 * s * s + b * b)), 0.0, 1.0, tol).unwrap();
        assert!(r.converged);
        assert!((r.value.re - exact).abs() <= tol, "{} vs {exact}", r.value.re);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let r = integrate_adaptive_budget(|s| c((1.0 / (s + 1e-9)).sin()), 0.0, 1.0, 1e-14, 300).unwrap();
        assert!(!r.converged);
        assert!(r.evaluations <= 330);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(integrate_adaptive(|_| c(1.0), 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_adaptive(|_| c(1.0), 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn laplace_integral_with_frozen_phase() {
        let psi = |s: Complex64| (-s).exp();
        let spec = OscillatorySpec {
            lambda: 1e-12,
            r1: 0.5,
            r2: 0.5,
            amplitude: Amplitude::Plain(&psi),
            tail_rate: 1.0,
            peak_width: None,
        };
        let tol = 1e-9;
        let r = integrate_oscillatory_s(&spec, tol).unwrap();
        assert!((r.value - c(1.0)).norm() <= tol, "{}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn zero_tail_rate_is_a_precondition_error() {
        let psi = |s: Complex64| (-s).exp();
        let spec = OscillatorySpec {
            lambda: 1.0,
            r1: 0.5,
            r2: 0.5,
            amplitude: Amplitude::Plain(&psi),
            tail_rate: 0.0,
            peak_width: None,
        };
        assert!(matches!(integrate_oscillatory_s(&spec, 1e-8), Err(Error::Precondition(_))));
    }

    /// Reference for `int_0^inf e^{i lambda |n_s|} e^{-a s} ds` by brute force on
    /// the real axis: a fine fixed composite rule far past the point where the
    /// amplitude is negligible.
    fn brute_force(lambda: f64, r1: f64, r2: f64, a: f64) -> Complex64 {
        let end = 36.0 / a;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut x = 0.0;
        while x < end {
            let d1 = dist_diff(r1, r2, x).unwrap().d1;
            let h = (0.5 / (lambda * d1).max(1.0)).min(end - x);
            for (s, w, _) in gk15_rule(x, x + h) {
                let n = dist_diff(r1, r2, s).unwrap().value;
                acc += Complex64::from_polar(w * (-a * s).exp(), lambda * n);
            }
            x += h;
        }
        acc
    }

    #[test]
    fn contour_tail_matches_real_axis_brute_force() {
        let a = 2.0;
        let psi = move |s: Complex64| (-a * s).exp();
        for &lambda in &[1.0, 8.0, 40.0] {
            let spec = OscillatorySpec {
                lambda,
                r1: 0.5,
                r2: 0.7,
                amplitude: Amplitude::Plain(&psi),
                tail_rate: a,
                peak_width: None,
            };
            let r = integrate_oscillatory_s(&spec, 1e-10).unwrap();
            let bf = brute_force(lambda, 0.5, 0.7, a);
            assert!((r.value - bf).norm() < 1e-8, "lambda={lambda}: {} vs {bf}", r.value);
        }
    }

    #[test]
    fn slowly_decaying_amplitude_uses_contour() {
        let alpha = 0.5;
        let psi = move |s: Complex64| (-alpha * s).exp();
        let spec = OscillatorySpec {
            lambda: 4.0,
            r1: 0.5,
            r2: 0.5,
            amplitude: Amplitude::Plain(&psi),
            tail_rate: alpha,
            peak_width: None,
        };
        let tol = 1e-9;
        let a = integrate_oscillatory_s(&spec, tol).unwrap();
        let b = integrate_oscillatory_s_with(&spec, tol, &OscillatoryOptions { cut_scale: 2.0, ..Default::default() })
            .unwrap();
        assert!(a.converged && b.converged);
        assert!((a.value - b.value).norm() <= a.abs_error_estimate + b.abs_error_estimate);
    }

    #[test]
    fn decay_in_frequency() {
        // Unit-flux amplitude e^{-s}: |I_j| (2^j r1 r2)^{1/2} stays bounded.
        let psi = |s: Complex64| (-s).exp();
        let mut prev = f64::INFINITY;
        let mut normalized = Vec::new();
        for j in 1..=8 {
            let lambda = 2f64.powi(j);
            let spec = OscillatorySpec {
                lambda,
                r1: 0.5,
                r2: 0.5,
                amplitude: Amplitude::Plain(&psi),
                tail_rate: 1.0,
                peak_width: None,
            };
            let v = integrate_oscillatory_s(&spec, 1e-10).unwrap().value.norm();
            assert!(v < prev);
            prev = v;
            normalized.push(v * (lambda * 0.25).sqrt());
        }
        let max = normalized.iter().cloned().fold(0.0, f64::max);
        let min = normalized.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 3.0, "{normalized:?}");
    }

    #[test]
    fn peaked_amplitude_cross_validates() {
        let b: f64 = 1e-2;
        let psi = move |s: Complex64| (-s).exp() / (0.5 * s * s + b * b);
        let spec = OscillatorySpec {
            lambda: 1e-12,
            r1: 0.5,
            r2: 0.5,
            amplitude: Amplitude::Plain(&psi),
            tail_rate: 1.0,
            peak_width: Some(b),
        };
        let tol = 1e-7;
        let o = integrate_oscillatory_s_with(&spec, tol, &OscillatoryOptions { contour: false, ..Default::default() })
            .unwrap();
        let a = integrate_adaptive(|s| psi(c(s)), 0.0, 40.0, tol).unwrap();
        assert!((o.value - a.value).norm() <= 2.0 * tol, "{} vs {}", o.value, a.value);
    }

    #[test]
    fn bessel_kind_against_plain_real_axis() {
        // w(s) = e^{-2s}, order 0: compare with direct real-axis integration.
        let w = |s: Complex64| (-2.0 * s).exp();
        let spec = OscillatorySpec {
            lambda: 3.0,
            r1: 0.8,
            r2: 1.1,
            amplitude: Amplitude::Bessel { order: 0.0, weight: &w },
            tail_rate: 2.0,
            peak_width: None,
        };
        let r = integrate_oscillatory_s(&spec, 1e-10).unwrap();
        let direct = integrate_adaptive(|s| real_integrand(&spec, s), 0.0, 30.0, 1e-11).unwrap();
        assert!((r.value - direct.value).norm() < 1e-8, "{} vs {}", r.value, direct.value);
    }

    #[test]
    fn layout_respects_oscillation_cap() {
        let lay = layout(16.0, 0.5, 0.6, 0.5, Some(0.05), 1e-8, &OscillatoryOptions::default());
        assert!(lay.contour_at.is_some());
        for w in lay.breaks.windows(2) {
            assert!(w[1] > w[0]);
            let cap = panel_cap(16.0, 0.5, 0.6, w[1]);
            assert!(w[1] - w[0] <= cap * 1.001 + 1e-12);
        }
        assert!(lay.breaks[1] <= 0.05 / 8.0 + 1e-15);
    }
}

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{halton, spread, fit_slope, BoundReport};
use crate::error::{invalid, Error, Result};
use crate::geometry::{dist_diff, morse_change, FluxProfile, PolarPoint};
use crate::kernels::{br_kernel, kd_kernel, model_kernels, truncation_error_norm, DyadicPiece, KernelParams};
use crate::quadrature::integrate_adaptive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// `|x - y| <= |n_s|`.
    Distance,
    /// `int_0^inf e^{-|alpha| s} ds`.
    FluxDecay,
    /// The `sinh` cosh-denominator integral.
    SinhAmplitude,
    /// The `cosh` cosh-denominator integral.
    CoshAmplitude,
    /// Global decay `<|x - y|>^{-3/2 - delta}` of the full kernel.
    Decay,
    /// Dyadic diffractive pieces, uniformly in the frequency index.
    Dyadic,
    /// Model kernels of the third family.
    Model,
    /// Small-`s` model of the `sinh` family.
    SinhModel,
    /// Facts about the phase `|n_s|`.
    Phase,
    /// Decay rate of the Fourier truncation error.
    Truncation,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Distance,
        Suite::FluxDecay,
        Suite::SinhAmplitude,
        Suite::CoshAmplitude,
        Suite::Decay,
        Suite::Dyadic,
        Suite::Model,
        Suite::SinhModel,
        Suite::Phase,
        Suite::Truncation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Distance => "distance",
            Suite::FluxDecay => "flux_decay",
            Suite::SinhAmplitude => "sinh_amplitude",
            Suite::CoshAmplitude => "cosh_amplitude",
            Suite::Decay => "decay",
            Suite::Dyadic => "dyadic",
            Suite::Model => "model",
            Suite::SinhModel => "sinh_model",
            Suite::Phase => "phase",
            Suite::Truncation => "truncation",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite '{s}'")))
    }
}

/// Sweep grids and thresholds. `deltas` are signed exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub deltas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub ells: Vec<u8>,
    pub j_min: u32,
    pub j_max: u32,
    /// Sample points per sweep cell.
    pub samples: usize,
    /// Lower edges of the distance decades of the decay suite.
    pub decades: Vec<f64>,
    pub lambda: f64,
    pub tol: f64,
    /// Threshold for "bounded by a constant" quantities.
    pub bound_threshold: f64,
    /// Allowed `max / min` of normalized sups across scales.
    pub uniformity_threshold: f64,
    pub phase_draws: usize,
    pub m_list: Vec<usize>,
    pub slope_margin: f64,
    pub parseval_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            deltas: vec![-0.5, -1.0],
            alphas: vec![0.3, 0.5],
            ells: vec![1, 2, 3],
            j_min: 1,
            j_max: 8,
            samples: 48,
            decades: vec![1.0, 10.0, 100.0],
            lambda: 1.0,
            tol: 1e-10,
            bound_threshold: 10.0,
            uniformity_threshold: 3.0,
            phase_draws: 1000,
            m_list: (4..=10).map(|k| 1usize << k).collect(),
            slope_margin: 0.15,
            parseval_tol: 1e-6,
        }
    }
}

/// Runs one suite and returns a report per parameter combination.
pub fn verify_bounds(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    match suite {
        Suite::Distance => distance(cfg),
        Suite::FluxDecay => flux_decay(cfg),
        Suite::SinhAmplitude => cosh_family(cfg, true),
        Suite::CoshAmplitude => cosh_family(cfg, false),
        Suite::Decay => decay(cfg),
        Suite::Dyadic => dyadic(cfg),
        Suite::Model => model(cfg),
        Suite::SinhModel => sinh_model(cfg),
        Suite::Phase => phase(cfg),
        Suite::Truncation => truncation(cfg),
    }
}

fn distance(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let n = cfg.samples * cfg.samples;
    let mut sup: f64 = 0.0;
    for i in 1..=n {
        let r1 = 10f64.powf(-2.0 + 4.0 * halton(i, 2));
        let r2 = 10f64.powf(-2.0 + 4.0 * halton(i, 3));
        let dth = TAU * halton(i, 5);
        let s = 20.0 * halton(i, 7);
        let d = crate::geometry::dist_geo(r1, r2, dth)?;
        sup = sup.max(d / dist_diff(r1, r2, s)?.value);
    }
    Ok(vec![BoundReport::new("distance", &[], sup, n, cfg.bound_threshold)])
}

fn flux_decay(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    cfg.alphas
        .iter()
        .map(|&alpha| {
            let a = alpha.abs();
            let value = if a == 0.0 {
                f64::INFINITY
            } else {
                let end = 40.0 / a;
                let q = integrate_adaptive(|s| Complex64::new((-a * s).exp(), 0.0), 0.0, end, cfg.tol)?;
                q.value.re + (-a * end).exp() / a
            };
            Ok(BoundReport::new("flux_decay", &[("alpha", alpha)], value, 1, cfg.bound_threshold))
        })
        .collect()
}

/// Breakpoints `0, b/8, b/4, ..., end` resolving a peak of width `b` at zero.
fn graded(b: f64, end: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut x = (b / 8.0).clamp(1e-12, 0.125);
    while x < end {
        out.push(x);
        x *= 2.0;
    }
    out.push(end);
    out
}

fn integrate_abs(f: impl Fn(f64) -> f64, b: f64, end: f64, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for w in graded(b, end).windows(2) {
        total += integrate_adaptive(|s| Complex64::new(f(s).abs(), 0.0), w[0], w[1], tol)?.value.re;
    }
    Ok(total)
}

fn cosh_family(cfg: &VerifyConfig, sinh_part: bool) -> Result<Vec<BoundReport>> {
    let name = if sinh_part { "sinh_amplitude" } else { "cosh_amplitude" };
    cfg.alphas
        .iter()
        .map(|&alpha| {
            let a = alpha.abs();
            let rate = (1.0 - a).max(1e-3);
            let end = 40.0 / rate;
            let mut sup: f64 = 0.0;
            for i in 1..=cfg.samples {
                let dth = -PI + TAU * halton(i, 2);
                let h = 0.5 * (dth + PI);
                let b2 = 2.0 * h.sin().powi(2);
                let sn = (dth + PI).sin();
                let f = |s: f64| {
                    let den = 2.0 * (0.5 * s).sinh().powi(2) + b2;
                    if den == 0.0 {
                        return if sinh_part { -2.0 * a } else { 0.0 };
                    }
                    if sinh_part {
                        (f64::exp_m1(-s) + b2) * (a * s).sinh() / den
                    } else {
                        sn * (a * s).cosh() / den
                    }
                };
                sup = sup.max(integrate_abs(f, b2.sqrt(), end, cfg.tol)?);
            }
            Ok(BoundReport::new(name, &[("alpha", alpha)], sup, cfg.samples, cfg.bound_threshold))
        })
        .collect()
}

/// Sample pairs `(x, y)` with `|x - y|` log-uniform in `[lo, 10 lo)`.
fn decade_pairs(lo: f64, count: usize) -> Vec<(PolarPoint, PolarPoint)> {
    (1..=count)
        .filter_map(|i| {
            let d = lo * 10f64.powf(halton(i, 2));
            let r1 = 2.0 * d * halton(i, 3);
            let phi = TAU * halton(i, 5);
            let t1 = TAU * halton(i, 7);
            let (x1, y1) = (r1 * t1.cos(), r1 * t1.sin());
            let (x2, y2) = (x1 + d * phi.cos(), y1 + d * phi.sin());
            let x = PolarPoint::from_cartesian(x1, y1);
            let y = PolarPoint::from_cartesian(x2, y2);
            (x.r > 0.0 && y.r > 0.0).then_some((x, y))
        })
        .collect()
}

fn decay(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let mut reports = Vec::new();
    for &delta in &cfg.deltas {
        for &alpha in &cfg.alphas {
            let params = KernelParams::new(delta, cfg.lambda, FluxProfile::constant(alpha))?.with_tol(cfg.tol)?;
            let mut sups = Vec::new();
            let mut samples = 0;
            for &lo in &cfg.decades {
                let mut sup: f64 = 0.0;
                for (x, y) in decade_pairs(lo, cfg.samples) {
                    let k = br_kernel(&params, x, y)?;
                    let (ax, ay) = x.to_cartesian();
                    let (bx, by) = y.to_cartesian();
                    let d = (ax - bx).hypot(ay - by);
                    let bracket = (1.0 + (cfg.lambda * d).powi(2)).sqrt();
                    sup = sup.max(k.value.norm() * bracket.powf(1.5 + delta));
                    samples += 1;
                }
                sups.push(sup);
            }
            let mut params_out = vec![("delta", delta), ("alpha", alpha)];
            let names: Vec<String> = cfg.decades.iter().map(|d| format!("sup_{d}")).collect();
            for (name, s) in names.iter().zip(&sups) {
                params_out.push((name.as_str(), *s));
            }
            reports.push(BoundReport::new("decay", &params_out, spread(&sups), samples, cfg.uniformity_threshold));
        }
    }
    Ok(reports)
}

/// `(r1, r2, dtheta)` with `r1 + r2` spanning the support of the dyadic bump.
fn bump_samples(count: usize) -> Vec<(f64, f64, f64)> {
    (1..=count)
        .map(|i| {
            let t = 0.4 + 0.9 * halton(i, 2);
            let u = 0.05 + 0.9 * halton(i, 3);
            let dth = -PI + TAU * halton(i, 5);
            (t * u, t * (1.0 - u), dth)
        })
        .collect()
}

fn j_range(cfg: &VerifyConfig) -> Result<std::ops::RangeInclusive<u32>> {
    if cfg.j_min > cfg.j_max {
        return Err(invalid("j_min must not exceed j_max"));
    }
    Ok(cfg.j_min..=cfg.j_max)
}

fn dyadic(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let pts = bump_samples(cfg.samples);
    let mut reports = Vec::new();
    for &ell in &cfg.ells {
        for &delta in &cfg.deltas {
            for &alpha in &cfg.alphas {
                let profile = FluxProfile::constant(alpha);
                let mut sups = Vec::new();
                for j in j_range(cfg)? {
                    let piece = DyadicPiece::new(ell, j)?;
                    let mut sup: f64 = 0.0;
                    for &(r1, r2, dth) in &pts {
                        let k = kd_kernel(piece, &profile, delta, r1, r2, dth, None, cfg.tol)?;
                        let norm = k.value.norm() / piece.scale(delta) * (1.0 + piece.frequency() * r1 * r2).sqrt();
                        sup = sup.max(norm);
                    }
                    sups.push(sup);
                }
                let params = [("ell", ell as f64), ("delta", delta), ("alpha", alpha)];
                reports.push(BoundReport::new("dyadic", &params, spread(&sups), sups.len() * pts.len(), cfg.uniformity_threshold));
            }
        }
    }
    Ok(reports)
}

fn model(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let pts = bump_samples(cfg.samples);
    let mut reports = Vec::new();
    for &delta in &cfg.deltas {
        let mut diff_sups = Vec::new();
        let mut h_sups = Vec::new();
        for j in j_range(cfg)? {
            let piece = DyadicPiece { ell: 3, j };
            let (mut sd, mut sh): (f64, f64) = (0.0, 0.0);
            for &(r1, r2, dth) in &pts {
                let m = model_kernels(r1, r2, dth, j, delta, None, cfg.tol)?;
                let w = (1.0 + piece.frequency() * r1 * r2).sqrt() / piece.scale(delta);
                sd = sd.max(m.difference(j, r1, r2) * w);
                sh = sh.max(m.h.norm() * w);
            }
            diff_sups.push(sd);
            h_sups.push(sh);
        }
        let n = diff_sups.len() * pts.len();
        reports.push(BoundReport::new("model.kdm_minus_h", &[("delta", delta)], spread(&diff_sups), n, cfg.uniformity_threshold));
        reports.push(BoundReport::new("model.h", &[("delta", delta)], spread(&h_sups), n, cfg.uniformity_threshold));
    }
    Ok(reports)
}

fn sinh_model(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let mut reports = Vec::new();
    for &alpha in &cfg.alphas {
        let mut sup = [0.0f64; 2];
        let n_s = 200;
        for i in 1..=cfg.samples {
            let dth = -PI + TAU * halton(i, 2);
            let b2 = 2.0 * (0.5 * (dth + PI)).sin().powi(2);
            let diff = |s: f64| {
                let den = 2.0 * (0.5 * s).sinh().powi(2) + b2;
                let exact = (f64::exp_m1(-s) + b2) * (alpha * s).sinh() / den;
                let model = (-s + b2) * (alpha * s) / (0.5 * s * s + b2);
                exact - model
            };
            for k in 0..=n_s {
                // Stay off s = 0, where both terms are 0/0 on the shadow line.
                let s = 1e-4 + (1.0 - 2e-4) * k as f64 / n_s as f64;
                let h = 1e-5;
                sup[0] = sup[0].max(diff(s).abs());
                sup[1] = sup[1].max(((diff(s + h) - diff(s - h)) / (2.0 * h)).abs());
            }
        }
        let n = cfg.samples * (n_s + 1);
        reports.push(BoundReport::new("sinh_model.k0", &[("alpha", alpha)], sup[0], n, cfg.bound_threshold));
        reports.push(BoundReport::new("sinh_model.k1", &[("alpha", alpha)], sup[1], n, cfg.bound_threshold));
    }
    Ok(reports)
}

fn phase(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    let n = cfg.phase_draws;
    let mut d1_zero: f64 = 0.0;
    let mut monotone_violation: f64 = 0.0;
    let mut curvature: f64 = 0.0;
    let mut morse: f64 = 0.0;
    let grid = 40;
    for i in 1..=n {
        let t = 3.0 / 8.0 + (4.0 / 3.0 - 3.0 / 8.0) * halton(i, 2);
        let u = 0.02 + 0.96 * halton(i, 3);
        let (r1, r2) = (t * u, t * (1.0 - u));
        d1_zero = d1_zero.max(dist_diff(r1, r2, 0.0)?.d1.abs());
        for k in 0..=grid {
            let s = 1.0 + 9.0 * k as f64 / grid as f64;
            monotone_violation = monotone_violation.max(-dist_diff(r1, r2, s)?.d2);
            let s = k as f64 / grid as f64;
            let st = dist_diff(r1, r2, s)?;
            curvature = curvature.max(0.4 * r1 * r2 / (r1 + r2) / st.d2);
            let m = morse_change(r1, r2, s)?;
            morse = morse.max((r1 * r2 * m.s_tilde * m.s_tilde - (st.value - (r1 + r2))).abs());
        }
    }
    Ok(vec![
        BoundReport::new("phase.d1_at_zero", &[], d1_zero, n, 1e-12),
        BoundReport::new("phase.monotone_d1", &[("s_lo", 1.0), ("s_hi", 10.0)], monotone_violation, n * (grid + 1), 0.0),
        BoundReport::new("phase.d2_lower_bound", &[("factor", 0.4)], curvature, n * (grid + 1), 1.0),
        BoundReport::new("phase.morse_identity", &[], morse, n * (grid + 1), 1e-10),
    ])
}

/// `psi'(x)` by upward recurrence and the asymptotic series.
fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = x * x;
    acc + 1.0 / x + 1.0 / (2.0 * x2) + 1.0 / (6.0 * x2 * x) - 1.0 / (30.0 * x2 * x2 * x)
        + 1.0 / (42.0 * x2 * x2 * x2 * x)
        - 1.0 / (30.0 * x2 * x2 * x2 * x2 * x)
}

/// Exact `L^2` truncation error from Parseval: only odd `k >= M` carry mass.
pub(crate) fn parseval_error(m: usize) -> f64 {
    let m0 = m / 2; // first odd k >= M is 2 m0 + 1
    (2.0 / PI * trigamma(m0 as f64 + 0.5)).sqrt()
}

fn truncation(cfg: &VerifyConfig) -> Result<Vec<BoundReport>> {
    if cfg.m_list.len() < 2 {
        return Err(invalid("truncation suite needs at least two values of M"));
    }
    let logm: Vec<f64> = cfg.m_list.iter().map(|&m| (m as f64).ln()).collect();
    let mut reports = Vec::new();
    let mut parseval: f64 = 0.0;
    for (p, target) in [(2.0, -0.5), (4.0, -0.25)] {
        let mut logs = Vec::new();
        for &m in &cfg.m_list {
            let e = truncation_error_norm(m, p)?;
            if p == 2.0 {
                parseval = parseval.max((e - parseval_error(m)).abs());
            }
            logs.push(e.ln());
        }
        let slope = fit_slope(&logm, &logs);
        reports.push(BoundReport::new(
            "truncation.slope",
            &[("p", p), ("slope", slope), ("target", target)],
            (slope - target).abs(),
            cfg.m_list.len(),
            cfg.slope_margin,
        ));
    }
    reports.push(BoundReport::new("truncation.parseval", &[("p", 2.0)], parseval, cfg.m_list.len(), cfg.parseval_tol));
    Ok(reports)
}

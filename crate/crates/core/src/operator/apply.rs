use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{GridFunction, PolarGrid};
use crate::error::{invalid, Error, Result};
use crate::geometry::{dist_diff, dist_geo, FluxProfile};
use crate::kernels::{
    a_alpha, bessel_prefactor, diffractive_tail_rate, gauge_phase, half_shadow_angle, KernelParams, INV_4PI2,
};
use crate::quadrature::{contour_integrand, gk15_rule, layout, real_integrand, Amplitude, OscillatoryOptions, OscillatorySpec};
use crate::specialfn::bessel_ratio;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorOptions {
    /// Truncation tolerance of the diffractive `s`-integrals, relative to the
    /// kernel scale.
    pub tol: f64,
    /// Deform the tail of the `s`-integrals into the complex plane.
    pub contour: bool,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        OperatorOptions { tol: 1e-9, contour: true }
    }
}

#[derive(Debug, Clone)]
pub struct ApplyOutput {
    pub result: GridFunction,
    /// Bound on the quadrature error of the kernel, per output ring.
    pub abs_error: Vec<f64>,
}

impl ApplyOutput {
    pub fn max_error(&self) -> f64 {
        self.abs_error.iter().copied().fold(0.0, f64::max)
    }
}

/// The Bochner-Riesz operator discretized on a polar grid.
///
/// With `Phi~ = Phi - alpha theta` the kernel factors as
/// `e^{i Phi~(theta1)} K0(r1, r2, theta1 - theta2) e^{-i Phi~(theta2)}`, so each
/// ring pair contributes a circular convolution in angle. The rows of `K0`
/// are real-symmetric after a DFT and are cached once per grid. On the
/// shadow line `theta1 - theta2 = pi` the geometric factor takes the mean of
/// its two one-sided limits, which keeps the discrete operator self-adjoint.
pub struct BrOperator {
    params: KernelParams,
    grid: Arc<PolarGrid>,
    /// DFT of `K0(r_i, r_k, .)` for `i <= k`, packed by `pair_index`.
    table: Vec<f64>,
    pair_err: Vec<f64>,
    phase: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for BrOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BrOperator").field("params", &self.params).field("grid", &self.grid).finish_non_exhaustive()
    }
}

fn pair_index(n_r: usize, i: usize, k: usize) -> usize {
    let (i, k) = if i <= k { (i, k) } else { (k, i) };
    i * n_r - i * (i + 1) / 2 + k
}

/// One node of the fixed `s`-rule, with the angle-independent parts of
/// the diffractive factor precomputed.
struct Node {
    wk: Complex64,
    wg: Complex64,
    em1: Complex64,
    sha: Complex64,
    cha: Complex64,
    den0: Complex64,
}

struct PairRule {
    nodes: Vec<Node>,
    /// `sum w e^{-|alpha| s}` for both rules.
    first: (Complex64, Complex64),
    tail: f64,
}

/// Half row `q = 0..=n/2` of `K0` for one ring pair.
struct HalfRow {
    values: Vec<Complex64>,
    err: f64,
}

impl BrOperator {
    pub fn new(params: KernelParams, grid: Arc<PolarGrid>) -> Result<Self> {
        Self::with_options(params, grid, OperatorOptions::default())
    }

    pub fn with_options(params: KernelParams, grid: Arc<PolarGrid>, opts: OperatorOptions) -> Result<Self> {
        params.validate()?;
        if !(opts.tol > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {}", opts.tol)));
        }
        let alpha = params.profile.alpha();
        if params.profile.integer_flux().is_none() && alpha.abs() >= 1.0 {
            return Err(Error::UnsupportedRegime(format!(
                "diffractive part needs |alpha| < 1 for non-integer flux, got {alpha}"
            )));
        }
        let n = grid.n_theta();
        let n_r = grid.n_r();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let builder = RowBuilder::new(&params, &grid, opts);
        let pairs: Vec<(usize, usize)> = (0..n_r).flat_map(|i| (i..n_r).map(move |k| (i, k))).collect();
        let rows: Vec<(Vec<f64>, f64)> = pairs
            .par_iter()
            .map(|&(i, k)| {
                let half = builder.half_row(i, k)?;
                let mut full = expand_row(&half.values, n);
                fft.process(&mut full);
                Ok((full.iter().map(|c| c.re).collect(), half.err))
            })
            .collect::<Result<_>>()?;
        let mut table = Vec::with_capacity(pairs.len() * n);
        let mut pair_err = Vec::with_capacity(pairs.len());
        for (row, err) in rows {
            table.extend_from_slice(&row);
            pair_err.push(err);
        }
        let phase = (0..n).map(|q| periodic_gauge(&params.profile, grid.theta(q))).collect();
        Ok(BrOperator { params, grid, table, pair_err, phase, fft, ifft })
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    fn check_grid(&self, f: &GridFunction) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, f.grid()) && *self.grid != **f.grid() {
            return Err(invalid("input lives on a different grid than the operator"));
        }
        Ok(())
    }

    /// `S f` by ring-pair circular convolutions.
    pub fn apply(&self, f: &GridFunction) -> Result<ApplyOutput> {
        self.check_grid(f)?;
        let n = self.grid.n_theta();
        let n_r = self.grid.n_r();
        let spectra: Vec<Vec<Complex64>> = (0..n_r)
            .map(|k| {
                let mut ring: Vec<Complex64> = f.ring(k).iter().zip(&self.phase).map(|(v, p)| v * p.conj()).collect();
                self.fft.process(&mut ring);
                ring
            })
            .collect();
        let mass: Vec<f64> = (0..n_r).map(|k| f.ring(k).iter().map(|v| v.norm()).sum()).collect();
        let rings: Vec<(Vec<Complex64>, f64)> = (0..n_r)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![Complex64::new(0.0, 0.0); n];
                let mut err = 0.0;
                for k in 0..n_r {
                    let w = self.grid.weight(k);
                    let p = pair_index(n_r, i, k);
                    let row = &self.table[p * n..(p + 1) * n];
                    for ((a, &kh), fh) in acc.iter_mut().zip(row).zip(&spectra[k]) {
                        *a += w * kh * fh;
                    }
                    err += w * self.pair_err[p] * mass[k];
                }
                self.ifft.process(&mut acc);
                let scale = 1.0 / n as f64;
                for (a, p) in acc.iter_mut().zip(&self.phase) {
                    *a *= scale * p;
                }
                (acc, err)
            })
            .collect();
        let mut values = Vec::with_capacity(self.grid.len());
        let mut abs_error = Vec::with_capacity(n_r);
        for (ring, err) in rings {
            values.extend(ring);
            abs_error.push(err);
        }
        Ok(ApplyOutput { result: GridFunction::from_values(self.grid.clone(), values)?, abs_error })
    }

    /// `S f` by the plain double sum with the angular factors evaluated
    /// pointwise; `O(N_r^2 n_theta^2)`, meant for cross-checks on small grids.
    pub fn apply_direct(&self, f: &GridFunction) -> Result<ApplyOutput> {
        self.check_grid(f)?;
        let n = self.grid.n_theta();
        let n_r = self.grid.n_r();
        let builder = RowBuilder::new(&self.params, &self.grid, OperatorOptions::default());
        let profile = &self.params.profile;
        let alpha = profile.alpha();
        let mut values = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        let mut abs_error = vec![0.0; n_r];
        for i in 0..n_r {
            for k in 0..n_r {
                let w = self.grid.weight(k);
                let geo = builder.geometric_magnitudes(i, k);
                let diff = builder.diffractive_half(i, k)?;
                let diff_full = expand_row(&diff.values, n);
                abs_error[i] += w * diff.err * f.ring(k).iter().map(|v| v.norm()).sum::<f64>();
                for p in 0..n {
                    let t1 = self.grid.theta(p);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for q in 0..n {
                        let t2 = self.grid.theta(q);
                        let m = (p + n - q) % n;
                        let a = if 2 * m == n {
                            gauge_phase(profile, t1, t2) * (alpha * PI).cos() * INV_4PI2
                        } else {
                            a_alpha(profile, t1, t2)
                        };
                        let kernel = geo[m.min(n - m)] * a + gauge_phase(profile, t1, t2) * diff_full[m];
                        acc += kernel * f.get(k, q);
                    }
                    values[i * n + p] += w * acc;
                }
            }
        }
        Ok(ApplyOutput { result: GridFunction::from_values(self.grid.clone(), values)?, abs_error })
    }
}

/// Builds `S` on the grid of `f` and applies it once.
pub fn apply_br(params: &KernelParams, f: &GridFunction) -> Result<ApplyOutput> {
    BrOperator::new(params.clone(), f.grid().clone())?.apply(f)
}

fn periodic_gauge(profile: &FluxProfile, theta: f64) -> Complex64 {
    if profile.is_constant() {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, profile.periodic_phase(theta))
    }
}

/// Full row from `q = 0..=n/2` using `K0(-Delta) = conj K0(Delta)`.
fn expand_row(half: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    full[..=n / 2].copy_from_slice(half);
    for q in n / 2 + 1..n {
        full[q] = half[n - q].conj();
    }
    full
}

struct RowBuilder<'a> {
    grid: &'a PolarGrid,
    lambda: f64,
    nu: f64,
    alpha: f64,
    pref: f64,
    opts: OperatorOptions,
    integer: bool,
    /// `(2 sin^2 h, 2 sin h cos h)` for `Delta_q`, `q = 0..=n/2`.
    angles: Vec<(f64, f64)>,
    peak: f64,
}

impl<'a> RowBuilder<'a> {
    fn new(params: &KernelParams, grid: &'a PolarGrid, opts: OperatorOptions) -> Self {
        let n = grid.n_theta();
        let angles = (0..=n / 2)
            .map(|q| {
                let (s, c) = half_shadow_angle(grid.theta(q)).sin_cos();
                (2.0 * s * s, 2.0 * s * c)
            })
            .collect();
        RowBuilder {
            grid,
            lambda: params.lambda,
            nu: 1.0 + params.delta,
            alpha: params.profile.alpha(),
            pref: bessel_prefactor(params.delta, params.lambda),
            opts,
            integer: params.profile.integer_flux().is_some(),
            angles,
            peak: (2f64.sqrt() * (PI / n as f64).sin()).min(2.0),
        }
    }

    /// `pref (lambda d)^{-nu} J_nu(lambda d)` for `q = 0..=n/2`.
    fn geometric_magnitudes(&self, i: usize, k: usize) -> Vec<f64> {
        let (r1, r2) = (self.grid.radii()[i], self.grid.radii()[k]);
        (0..=self.grid.n_theta() / 2)
            .map(|q| {
                let d = dist_geo(r1, r2, self.grid.theta(q)).unwrap_or(0.0);
                self.pref * bessel_ratio(self.nu, self.lambda * d).0
            })
            .collect()
    }

    fn half_row(&self, i: usize, k: usize) -> Result<HalfRow> {
        let n = self.grid.n_theta();
        let geo = self.geometric_magnitudes(i, k);
        let mut row = self.diffractive_half(i, k)?;
        for (q, (v, g)) in row.values.iter_mut().zip(geo).enumerate() {
            let a = if 2 * q == n {
                Complex64::new((self.alpha * PI).cos() * INV_4PI2, 0.0)
            } else {
                Complex64::from_polar(INV_4PI2, self.alpha * self.grid.theta(q))
            };
            *v += g * a;
        }
        Ok(row)
    }

    fn pair_rule(&self, r1: f64, r2: f64) -> PairRule {
        let one = |_: Complex64| Complex64::new(1.0, 0.0);
        let power = self.nu + 0.5;
        let spec = OscillatorySpec {
            lambda: self.lambda,
            r1,
            r2,
            amplitude: Amplitude::Bessel { order: self.nu, weight: &one },
            tail_rate: diffractive_tail_rate(self.alpha, power),
            peak_width: Some(self.peak),
        };
        let qopts = OscillatoryOptions { contour: self.opts.contour, ..OscillatoryOptions::default() };
        let lay = layout(self.lambda, r1, r2, spec.tail_rate, spec.peak_width, self.opts.tol, &qopts);
        let a = self.alpha;
        let mut nodes = Vec::new();
        let mut first = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut push = |s: Complex64, f: Complex64, wk: Complex64, wg: Complex64| {
            let e = (-a.abs() * s).exp();
            first.0 += wk * f * e;
            first.1 += wg * f * e;
            let sh = (0.5 * s).sinh();
            nodes.push(Node {
                wk: wk * f,
                wg: wg * f,
                em1: (-s).exp() - 1.0,
                sha: (a * s).sinh(),
                cha: (a * s).cosh(),
                den0: 2.0 * sh * sh,
            });
        };
        for w in lay.breaks.windows(2) {
            for (x, wk, wg) in gk15_rule(w[0], w[1]) {
                let f = real_integrand(&spec, x);
                push(Complex64::new(x, 0.0), f, Complex64::new(wk, 0.0), Complex64::new(wg, 0.0));
            }
        }
        let end = *lay.breaks.last().unwrap();
        let tail = match lay.contour_at {
            Some(cut) => {
                let rate = self.lambda * dist_diff(r1, r2, cut).map(|st| st.d1).unwrap_or(1.0);
                let mut taus = vec![0.0];
                let mut t = (1.0 / rate).min(FRAC_PI_2);
                while t < FRAC_PI_2 {
                    taus.push(t);
                    t *= 2.0;
                }
                taus.push(FRAC_PI_2);
                for sigma in [1.0, -1.0] {
                    for w in taus.windows(2) {
                        for (x, wk, wg) in gk15_rule(w[0], w[1]) {
                            let f = contour_integrand(&spec, cut, sigma, x);
                            push(Complex64::new(cut, sigma * x), f, Complex64::new(wk, 0.0), Complex64::new(wg, 0.0));
                        }
                    }
                }
                0.0
            }
            None => {
                let z = self.lambda * dist_diff(r1, r2, end).map(|st| st.value).unwrap_or(r1 + r2);
                let amp = bessel_ratio(self.nu, z).0.abs().max(z.powf(-power));
                let decay = (-a.abs().min(1.0 - a.abs()) * end).exp();
                3.0 * INV_4PI2 * amp * decay / spec.tail_rate
            }
        };
        PairRule { nodes, first, tail }
    }

    /// Diffractive part of `K0` for `q = 0..=n/2`.
    fn diffractive_half(&self, i: usize, k: usize) -> Result<HalfRow> {
        let len = self.grid.n_theta() / 2 + 1;
        if self.integer {
            return Ok(HalfRow { values: vec![Complex64::new(0.0, 0.0); len], err: 0.0 });
        }
        let (r1, r2) = (self.grid.radii()[i], self.grid.radii()[k]);
        let rule = self.pair_rule(r1, r2);
        let a = self.alpha;
        let sin_abs = (a.abs() * PI).sin();
        let sin_alpha = (a * PI).sin();
        let mut values = Vec::with_capacity(len);
        let mut err: f64 = 0.0;
        for &(s2, sn) in &self.angles {
            let mut kr = Complex64::new(0.0, 0.0);
            let mut gr = Complex64::new(0.0, 0.0);
            let mut ki = Complex64::new(0.0, 0.0);
            let mut gi = Complex64::new(0.0, 0.0);
            for nd in &rule.nodes {
                let inv = (nd.den0 + s2).inv();
                let re = (nd.em1 + s2) * nd.sha * inv;
                let im = nd.cha * inv;
                kr += nd.wk * re;
                gr += nd.wg * re;
                ki += nd.wk * im;
                gi += nd.wg * im;
            }
            let i_sn = Complex64::new(0.0, sn);
            let kv = sin_abs * rule.first.0 + sin_alpha * (kr - i_sn * ki);
            let gv = sin_abs * rule.first.1 + sin_alpha * (gr - i_sn * gi);
            let scale = -INV_4PI2 * self.pref;
            values.push(scale * kv);
            err = err.max((scale * (kv - gv)).norm());
        }
        Ok(HalfRow { values, err: err + self.pref * rule.tail })
    }
}

//! Free-space reference: the Fourier multiplier `(1 - |xi|^2/lambda^2)^delta_+ / Gamma(1 + delta)`
//! applied on a periodic Cartesian grid.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::GridFunction;
use crate::error::{invalid, Error, Result};
use crate::specialfn::gamma_fn;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Side of the periodic box in units of the grid radius.
    pub padding: f64,
    /// FFT size per axis (a power of two).
    pub n_fft: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { padding: 8.0, n_fft: 512 }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > -1.0) || !delta.is_finite() {
        return Err(Error::UnsupportedRegime(format!(
            "the multiplier is locally integrable only for delta > -1, got {delta}"
        )));
    }
    Ok(())
}

/// Mean of `(1 - u)^delta_+` over the cell `[x0, x1] x [y0, y1]`, treating
/// `u = |xi|^2 / lambda^2` as uniformly distributed between its extremes (exact
/// on annular sectors, second order elsewhere).
fn cell_mean(delta: f64, lambda: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let near = |a: f64, b: f64| if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
    let far = |a: f64, b: f64| a.abs().max(b.abs());
    let l2 = lambda * lambda;
    let u_lo = (near(x0, x1).powi(2) + near(y0, y1).powi(2)) / l2;
    let u_hi = (far(x0, x1).powi(2) + far(y0, y1).powi(2)) / l2;
    if u_lo >= 1.0 {
        return 0.0;
    }
    let p = 1.0 + delta;
    let top = u_hi.min(1.0);
    ((1.0 - u_lo).powf(p) - (1.0 - top).powf(p)) / (p * (u_hi - u_lo))
}

/// Kernel of the free multiplier at separations `|z|`, by a lattice sum
/// over `xi` with spacing `dxi` and cell-averaged multiplier values.
pub fn free_kernel_oracle(delta: f64, lambda: f64, separations: &[f64], dxi: f64) -> Result<Vec<f64>> {
    check_delta(delta)?;
    if !(lambda > 0.0) || !(dxi > 0.0) || dxi > lambda {
        return Err(invalid(format!("need 0 < dxi <= lambda, got dxi = {dxi}, lambda = {lambda}")));
    }
    let kmax = (lambda / dxi).ceil() as i64 + 1;
    let h = 0.5 * dxi;
    // Column sums over xi_y; z points along the first axis.
    let columns: Vec<f64> = (-kmax..=kmax)
        .map(|kx| {
            let x = kx as f64 * dxi;
            (-kmax..=kmax)
                .map(|ky| {
                    let y = ky as f64 * dxi;
                    cell_mean(delta, lambda, x - h, x + h, y - h, y + h)
                })
                .sum()
        })
        .collect();
    let scale = dxi * dxi / (4.0 * PI * PI * gamma_fn(1.0 + delta)?);
    Ok(separations
        .iter()
        .map(|&z| {
            let sum: f64 = (-kmax..=kmax).zip(&columns).map(|(kx, c)| c * (kx as f64 * dxi * z).cos()).sum();
            scale * sum
        })
        .collect())
}

/// `(1 - Delta/lambda^2)^delta_+ f / Gamma(1 + delta)` for the free Laplacian,
/// resampled back onto the polar grid of `f`.
///
/// `f` is interpolated bilinearly in `(r, theta)` onto a periodic Cartesian box;
/// the band-limited result is summed exactly at every polar node.
pub fn free_multiplier_oracle(delta: f64, lambda: f64, f: &GridFunction, opts: OracleOptions) -> Result<GridFunction> {
    check_delta(delta)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !opts.n_fft.is_power_of_two() || !(opts.padding >= 2.0) {
        return Err(invalid("n_fft must be a power of two and padding at least 2"));
    }
    let grid = f.grid().clone();
    let n = opts.n_fft;
    let side = opts.padding * grid.r_max();
    let dx = side / n as f64;
    let dxi = TAU / side;
    if PI / dx < 2.0 * lambda {
        return Err(invalid(format!("n_fft = {n} does not resolve frequency {lambda} on a box of side {side}")));
    }
    // Sample on x_j = -side/2 + j dx.
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for jy in 0..n {
        let y = -0.5 * side + jy as f64 * dx;
        for jx in 0..n {
            let x = -0.5 * side + jx as f64 * dx;
            data[jy * n + jx] = interpolate(f, x, y);
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    fft2(&mut data, n, &*fft);

    let kmax = (lambda / dxi).ceil() as i64 + 1;
    let width = (2 * kmax + 1) as usize;
    let gamma = gamma_fn(1.0 + delta)?;
    let h = 0.5 * dxi;
    let norm = 1.0 / (n * n) as f64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); width * width];
    for ky in -kmax..=kmax {
        for kx in -kmax..=kmax {
            let (xi, eta) = (kx as f64 * dxi, ky as f64 * dxi);
            let m = cell_mean(delta, lambda, xi - h, xi + h, eta - h, eta + h) / gamma;
            if m == 0.0 {
                continue;
            }
            let idx = |k: i64| k.rem_euclid(n as i64) as usize;
            coeffs[(ky + kmax) as usize * width + (kx + kmax) as usize] = m * norm * data[idx(ky) * n + idx(kx)];
        }
    }
    // Exact trigonometric sum at the polar nodes: e^{i xi (x + side/2)}.
    let values = (0..grid.n_r())
        .flat_map(|i| (0..grid.n_theta()).map(move |q| (i, q)))
        .map(|(i, q)| {
            let r = grid.radii()[i];
            let (s, c) = grid.theta(q).sin_cos();
            let ex = axis_phases(r * c + 0.5 * side, dxi, kmax);
            let ey = axis_phases(r * s + 0.5 * side, dxi, kmax);
            let mut acc = Complex64::new(0.0, 0.0);
            for (row, py) in coeffs.chunks(width).zip(&ey) {
                let inner: Complex64 = row.iter().zip(&ex).map(|(c, p)| c * p).sum();
                acc += inner * py;
            }
            acc
        })
        .collect();
    GridFunction::from_values(grid, values)
}

fn axis_phases(x: f64, dxi: f64, kmax: i64) -> Vec<Complex64> {
    let step = Complex64::from_polar(1.0, dxi * x);
    let mut p = Complex64::from_polar(1.0, -(kmax as f64) * dxi * x);
    let mut out = Vec::with_capacity((2 * kmax + 1) as usize);
    for k in -kmax..=kmax {
        // Re-anchor periodically to stop the product drifting.
        if k % 16 == 0 {
            p = Complex64::from_polar(1.0, k as f64 * dxi * x);
        }
        out.push(p);
        p *= step;
    }
    out
}

fn fft2(data: &mut [Complex64], n: usize, fft: &dyn rustfft::Fft<f64>) {
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for jx in 0..n {
        for jy in 0..n {
            col[jy] = data[jy * n + jx];
        }
        fft.process(&mut col);
        for jy in 0..n {
            data[jy * n + jx] = col[jy];
        }
    }
}

/// Bilinear interpolation in `(r, theta)`; zero beyond the outer radius.
fn interpolate(f: &GridFunction, x: f64, y: f64) -> Complex64 {
    let grid = f.grid();
    let r = x.hypot(y);
    if r >= grid.r_max() {
        return Complex64::new(0.0, 0.0);
    }
    let n = grid.n_theta();
    let t = y.atan2(x).rem_euclid(TAU) / grid.dtheta();
    let q0 = (t.floor() as usize) % n;
    let q1 = (q0 + 1) % n;
    let ft = t - t.floor();
    let ring = |i: usize| f.get(i, q0) * (1.0 - ft) + f.get(i, q1) * ft;
    let u = r / grid.dr() - 0.5;
    if u <= 0.0 {
        return ring(0);
    }
    let i0 = u.floor() as usize;
    if i0 + 1 >= grid.n_r() {
        return ring(grid.n_r() - 1);
    }
    let fu = u - u.floor();
    ring(i0) * (1.0 - fu) + ring(i0 + 1) * fu
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::PolarGrid;

    #[test]
    fn cell_mean_limits() {
        // Far inside: midpoint value; far outside: zero.
        let v = cell_mean(0.5, 1.0, 0.1, 0.11, 0.0, 0.01);
        assert!((v - (1.0 - 0.105f64.powi(2)).sqrt()).abs() < 1e-3);
        assert_eq!(cell_mean(0.5, 1.0, 1.1, 1.2, 0.0, 0.1), 0.0);
        // Integrable singularity: finite mean on the ring.
        assert!(cell_mean(-0.7, 1.0, 0.99, 1.01, -0.01, 0.01).is_finite());
    }

    #[test]
    fn kernel_oracle_matches_sonine_at_zero_order() {
        // delta = 0: the kernel of the disc multiplier is J_1(|z|) / (2 pi |z|).
        let z = [0.5, 3.0, 7.25];
        let k = free_kernel_oracle(0.0, 1.0, &z, TAU / 4000.0).unwrap();
        for (zi, ki) in z.iter().zip(&k) {
            let exact = crate::specialfn::bessel_j(1.0, *zi).unwrap().value / (TAU * zi);
            assert!((ki - exact).abs() < 2e-4 * exact.abs().max(0.01), "z={zi}: {ki} vs {exact}");
        }
    }

    #[test]
    fn oracle_preserves_low_frequency_gaussian() {
        // The transform of e^{-r^2/8} is negligible beyond |xi| = 4, where the
        // multiplier with delta = 0 is one.
        let grid = PolarGrid::uniform(256, 64, 24.0).unwrap();
        let f = GridFunction::from_fn(grid.clone(), |r, _| Complex64::new((-r * r / 8.0).exp(), 0.0));
        let g = free_multiplier_oracle(0.0, 4.0, &f, OracleOptions { padding: 4.0, n_fft: 512 }).unwrap();
        let err: f64 = f.values().iter().zip(g.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn rejects_bad_regimes() {
        let grid = PolarGrid::uniform(4, 8, 1.0).unwrap();
        let f = GridFunction::zeros(grid);
        assert!(matches!(free_multiplier_oracle(-1.0, 1.0, &f, OracleOptions::default()), Err(Error::UnsupportedRegime(_))));
        assert!(free_multiplier_oracle(0.0, 1e3, &f, OracleOptions::default()).is_err());
    }
}

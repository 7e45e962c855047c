use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;

/// `c_k = sin(k pi / 2) / (pi k)`, with `c_0 = 1/2`.
pub fn fourier_coefficient(k: i64) -> f64 {
    if k == 0 {
        return 0.5;
    }
    let s = match k.rem_euclid(4) {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    };
    s / (PI * k as f64)
}

/// `sum_{|k| < M} c_k e^{-i k theta / 2}`: the partial Fourier series of the
/// indicator of `|theta| <= pi` on the period-`4 pi` circle.
pub fn indicator_fourier_partial(m: usize, theta: f64) -> Result<Complex64> {
    if m < 1 {
        return Err(invalid("M must be at least 1"));
    }
    if !(-TAU..=TAU).contains(&theta) {
        return Err(invalid(format!("theta must lie in [-2pi, 2pi], got {theta}")));
    }
    Ok(Complex64::new(partial_sum(m, theta), 0.0))
}

/// The series is even in `k`, so it is real: `1/2 + 2 sum_{0 < k < M} c_k cos(k theta / 2)`.
fn partial_sum(m: usize, theta: f64) -> f64 {
    let x = 0.5 * theta;
    let c1 = x.cos();
    let (mut prev, mut cur) = (1.0, c1);
    let mut acc = 0.5;
    for k in 1..m {
        if k > 1 {
            let next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
        }
        acc += 2.0 * fourier_coefficient(k as i64) * cur;
    }
    acc
}

/// `|| 1_{|theta| <= pi} - S_M ||_{L^p(-2pi, 2pi)}` by composite Gauss-Legendre
/// quadrature with panels split at the jumps and shorter than the Gibbs scale.
pub fn truncation_error_norm(m: usize, p: f64) -> Result<f64> {
    if m < 2 {
        return Err(invalid(format!("M must be at least 2, got {m}")));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must be finite and at least 1, got {p}")));
    }
    const ORDER: usize = 16;
    let (nodes, weights) = gauss_legendre(ORDER);
    // Symmetric integrand: integrate over [0, 2pi] and double.
    let mut total = 0.0;
    for (lo, hi, inside) in [(0.0, PI, 1.0), (PI, TAU, 0.0)] {
        // Panels finer near the jump at pi, where the error is largest.
        let base = (hi - lo) / (m as f64).max(8.0);
        let mut edges = vec![lo];
        let mut x = lo;
        while x < hi {
            let dist = if inside == 1.0 { hi - x } else { x - lo };
            let w = base.min((0.25 * dist).max(base / 64.0));
            x = (x + w).min(hi);
            edges.push(x);
        }
        for e in edges.windows(2) {
            let c = 0.5 * (e[0] + e[1]);
            let h = 0.5 * (e[1] - e[0]);
            for (t, w) in nodes.iter().zip(&weights) {
                let th = c + h * t;
                total += w * h * (inside - partial_sum(m, th)).abs().powf(p);
            }
        }
    }
    Ok((2.0 * total).powf(1.0 / p))
}

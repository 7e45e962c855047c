//! Truncating the angular jump of a model oscillatory operator.
//!
//! The model kernel is `e^{2 pi i lambda |x - y|} psi(|x - y|) J(theta1 - theta2)`
//! with a bump `psi` supported away from zero and `J` the indicator of
//! `|theta1 - theta2| <= pi` on the period-`4 pi` circle. Replacing `J` by its
//! Fourier partial sum `S_M J` leaves a remainder `R_M = J - S_M J` whose
//! effect on test functions should shrink as `M` grows.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fit_slope, GridConfig};
use crate::error::{invalid, Result};
use crate::kernels::{bump_beta, fourier_coefficient, indicator_fourier_partial};
use crate::operator::{lp_norm, make_indicator, GridFunction, PolarGrid, ShapeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKind {
    /// The indicator of `|theta| <= pi`.
    Indicator,
    /// The constant one, whose series truncates exactly.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityConfig {
    pub lambda: f64,
    pub m_list: Vec<usize>,
    /// Output exponent.
    pub q: f64,
    /// Input exponent.
    pub r: f64,
    pub grid: GridConfig,
    pub jump: JumpKind,
    /// Allowed relative rise between consecutive `M` before the trend counts
    /// as non-monotone.
    pub noise: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            lambda: 4.0,
            m_list: (1..=8).map(|k| 1usize << k).collect(),
            q: 6.0,
            r: 2.0,
            grid: GridConfig { n_r: 24, n_theta: 128, r_max: 2.0 },
            jump: JumpKind::Indicator,
            noise: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub m: usize,
    /// `max_f ||T_{R_M} f||_q / ||f||_r` over the test functions.
    pub remainder_ratio: f64,
    /// `sum_{|k| < M} |c_k|`, which bounds the truncated operator by the
    /// untruncated one and grows like `log M`.
    pub truncated_norm_proxy: f64,
    /// `M` beyond the angular resolution of the grid.
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    /// Remainder ratios decrease over the unsaturated rows, up to `noise`.
    pub decreasing: bool,
    /// Slope of the norm proxy against `ln M`.
    pub log_growth_slope: f64,
    pub saturation_flagged: bool,
}

fn test_functions(grid: &std::sync::Arc<PolarGrid>) -> Vec<GridFunction> {
    let ball = make_indicator(grid.clone(), &ShapeSpec::Ball { center: (0.3, 0.2), radius: 0.8 }).function;
    let gauss = GridFunction::from_fn(grid.clone(), |r, t| {
        let (x, y) = (r * t.cos() + 0.4, r * t.sin());
        Complex64::new((-4.0 * (x * x + y * y)).exp(), 0.0)
    });
    let twisted = GridFunction::from_fn(grid.clone(), |r, t| {
        if (0.5..1.5).contains(&r) {
            Complex64::from_polar(1.0, t)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    vec![ball, gauss, twisted]
}

pub fn stability_experiment(cfg: &StabilityConfig) -> Result<StabilityReport> {
    if cfg.m_list.is_empty() || cfg.m_list.iter().any(|&m| m < 2) {
        return Err(invalid("M values must be at least 2"));
    }
    if !(cfg.q >= 1.0 && cfg.r >= 1.0) || !(cfg.lambda > 0.0) {
        return Err(invalid("need q, r >= 1 and lambda > 0"));
    }
    let grid = cfg.grid.build()?;
    let n = grid.n_theta();
    let n_r = grid.n_r();
    // Oscillatory radial part, by ring pair and angle index difference mod n.
    let mut base = vec![Complex64::new(0.0, 0.0); n_r * n_r * n];
    for i in 0..n_r {
        for k in 0..n_r {
            for m in 0..n {
                let d = crate::geometry::dist_geo(grid.radii()[i], grid.radii()[k], grid.theta(m))?;
                let psi = bump_beta(d);
                if psi != 0.0 {
                    base[(i * n_r + k) * n + m] = psi * Complex64::from_polar(1.0, TAU * cfg.lambda * d);
                }
            }
        }
    }
    let tests = test_functions(&grid);
    let jump = |delta: f64| match cfg.jump {
        JumpKind::Indicator => {
            if delta.abs() <= std::f64::consts::PI {
                1.0
            } else {
                0.0
            }
        }
        JumpKind::Constant => 1.0,
    };
    let mut rows = Vec::new();
    for &m in &cfg.m_list {
        // Remainder on the signed angle differences (p - q) dtheta, p - q in (-n, n).
        let mut rem = vec![0.0; 2 * n - 1];
        for (idx, slot) in rem.iter_mut().enumerate() {
            let delta = (idx as f64 - (n as f64 - 1.0)) * grid.dtheta();
            let partial = match cfg.jump {
                JumpKind::Indicator => indicator_fourier_partial(m, delta)?.re,
                JumpKind::Constant => 1.0,
            };
            *slot = jump(delta) - partial;
        }
        let mut worst: f64 = 0.0;
        for f in &tests {
            let mut g = vec![Complex64::new(0.0, 0.0); grid.len()];
            for i in 0..n_r {
                for k in 0..n_r {
                    let w = grid.weight(k);
                    let row = &base[(i * n_r + k) * n..(i * n_r + k + 1) * n];
                    for p in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for q in 0..n {
                            let kern = row[(p + n - q) % n];
                            if kern == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            acc += kern * rem[p + n - 1 - q] * f.get(k, q);
                        }
                        g[i * n + p] += w * acc;
                    }
                }
            }
            let g = GridFunction::from_values(grid.clone(), g)?;
            let denom = lp_norm(f, cfg.r)?;
            if denom > 0.0 {
                worst = worst.max(lp_norm(&g, cfg.q)? / denom);
            }
        }
        let proxy = match cfg.jump {
            JumpKind::Indicator => (-(m as i64) + 1..m as i64).map(|k| fourier_coefficient(k).abs()).sum(),
            JumpKind::Constant => 1.0,
        };
        rows.push(StabilityRow { m, remainder_ratio: worst, truncated_norm_proxy: proxy, saturated: m > n });
    }
    let live: Vec<&StabilityRow> = rows.iter().filter(|r| !r.saturated).collect();
    let decreasing = live.windows(2).all(|w| w[1].remainder_ratio <= w[0].remainder_ratio * (1.0 + cfg.noise) + 1e-14);
    let log_growth_slope = if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| (r.m as f64).ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.truncated_norm_proxy).collect();
        fit_slope(&x, &y)
    } else {
        f64::NAN
    };
    let saturation_flagged = rows.iter().any(|r| r.saturated);
    Ok(StabilityReport { rows, decreasing, log_growth_slope, saturation_flagged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> StabilityConfig {
        StabilityConfig {
            grid: GridConfig { n_r: 12, n_theta: 32, r_max: 2.0 },
            m_list: vec![2, 4, 8, 16, 64],
            ..Default::default()
        }
    }

    #[test]
    fn remainder_shrinks_and_saturation_is_flagged() {
        let rep = stability_experiment(&quick()).unwrap();
        assert!(rep.decreasing, "{:?}", rep.rows);
        assert!(rep.saturation_flagged);
        assert!(rep.rows.last().unwrap().saturated);
        // Only odd k contribute 1/(pi k), so the proxy grows like ln(M) / pi.
        assert!((rep.log_growth_slope - 1.0 / std::f64::consts::PI).abs() < 0.02, "{}", rep.log_growth_slope);
    }

    #[test]
    fn constant_jump_leaves_no_remainder() {
        let rep = stability_experiment(&StabilityConfig { jump: JumpKind::Constant, ..quick() }).unwrap();
        assert!(rep.rows.iter().all(|r| r.remainder_ratio < 1e-12));
    }

    #[test]
    fn rejects_tiny_m() {
        assert!(stability_experiment(&StabilityConfig { m_list: vec![1], ..quick() }).is_err());
    }
}

use std::f64::consts::TAU;
use std::path::Path;

use super::normalize_angle;
use crate::error::{invalid, Result};

/// Mean of `A` over the circle from uniform samples (periodic trapezoid rule).
pub fn flux_alpha(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("flux profile needs at least one sample"));
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Angular potential `A(theta)` stored as uniform samples together with its
/// trigonometric interpolant, which gives the antiderivative in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxProfile {
    samples: Vec<f64>,
    alpha: f64,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

impl FluxProfile {
    pub fn constant(alpha: f64) -> Self {
        Self { samples: vec![alpha], alpha, cos_coeffs: Vec::new(), sin_coeffs: Vec::new() }
    }

    /// Builds the profile from samples `A(2 pi n / N)`, `n = 0..N`.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        let alpha = flux_alpha(&samples)?;
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("flux samples must be finite"));
        }
        let n = samples.len();
        let half = (n - 1) / 2;
        let mut cos_coeffs = Vec::with_capacity(n / 2);
        let mut sin_coeffs = Vec::with_capacity(n / 2);
        for k in 1..=half {
            let (mut a, mut b) = (0.0, 0.0);
            for (i, v) in samples.iter().enumerate() {
                let t = TAU * ((k * i) % n) as f64 / n as f64;
                a += v * t.cos();
                b += v * t.sin();
            }
            cos_coeffs.push(2.0 * a / n as f64);
            sin_coeffs.push(2.0 * b / n as f64);
        }
        if n.is_multiple_of(2) && n > 0 {
            // Nyquist mode cos(N theta / 2).
            let a: f64 = samples.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -*v }).sum();
            cos_coeffs.push(a / n as f64);
            sin_coeffs.push(0.0);
        }
        Ok(Self { samples, alpha, cos_coeffs, sin_coeffs })
    }

    /// `A(theta) = a0 + sum_k (cos_k cos k theta + sin_k sin k theta)`, `k >= 1`.
    pub fn from_coefficients(a0: f64, cos: &[f64], sin: &[f64]) -> Result<Self> {
        if cos.iter().chain(sin).chain(std::iter::once(&a0)).any(|v| !v.is_finite()) {
            return Err(invalid("flux coefficients must be finite"));
        }
        let k = cos.len().max(sin.len());
        let mut cos_coeffs = cos.to_vec();
        let mut sin_coeffs = sin.to_vec();
        cos_coeffs.resize(k, 0.0);
        sin_coeffs.resize(k, 0.0);
        let mut profile = Self { samples: Vec::new(), alpha: a0, cos_coeffs, sin_coeffs };
        let n = 2 * k + 2;
        profile.samples = (0..n).map(|i| profile.eval(TAU * i as f64 / n as f64)).collect();
        Ok(profile)
    }

    /// Reads a two-column `theta,value` table. Uniformly spaced angles are used
    /// as they are; other layouts are resampled by periodic linear interpolation.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(invalid(format!("line {}: expected two columns", line + 1)));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(t), Ok(v)) => rows.push((t, v)),
                _ if line == 0 && rows.is_empty() => continue,
                _ => return Err(invalid(format!("line {}: not numeric", line + 1))),
            }
        }
        Self::from_table(&rows)
    }

    pub fn from_table(rows: &[(f64, f64)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid("empty flux table"));
        }
        for w in rows.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(invalid("flux table angles must be strictly increasing"));
            }
        }
        if rows[0].0 < 0.0 || rows[rows.len() - 1].0 >= TAU {
            return Err(invalid("flux table angles must lie in [0, 2pi)"));
        }
        let n = rows.len();
        let uniform = rows.iter().enumerate().all(|(i, (t, _))| (t - TAU * i as f64 / n as f64).abs() < 1e-9);
        if uniform {
            return Self::from_samples(rows.iter().map(|r| r.1).collect());
        }
        let m = (4 * n).next_power_of_two().max(64);
        let samples = (0..m)
            .map(|i| {
                let t = TAU * i as f64 / m as f64;
                let j = rows.partition_point(|r| r.0 <= t);
                let (lo, hi) = match j {
                    0 => (rows[n - 1], (rows[0].0 + TAU, rows[0].1)),
                    j if j == n => (rows[n - 1], (rows[0].0 + TAU, rows[0].1)),
                    j => (rows[j - 1], rows[j]),
                };
                let t = if t < lo.0 { t + TAU } else { t };
                let w = (t - lo.0) / (hi.0 - lo.0);
                lo.1 + w * (hi.1 - lo.1)
            })
            .collect();
        Self::from_samples(samples)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// The integer `m` when the total flux is an integer.
    pub fn integer_flux(&self) -> Option<i64> {
        let m = self.alpha.round();
        ((self.alpha - m).abs() < 1e-12).then_some(m as i64)
    }

    pub fn is_constant(&self) -> bool {
        self.cos_coeffs.iter().chain(&self.sin_coeffs).all(|c| *c == 0.0)
    }

    /// Same profile with total flux `alpha` replaced (oscillating part kept).
    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut p = self.clone();
        let shift = alpha - self.alpha;
        p.alpha = alpha;
        p.samples.iter_mut().for_each(|v| *v += shift);
        p
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let t = normalize_angle(theta);
        let mut v = self.alpha;
        for (k, (a, b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let kt = (k + 1) as f64 * t;
            v += a * kt.cos() + b * kt.sin();
        }
        v
    }

    /// `Phi(theta) = int_0^theta A`, on the chart `[0, 2pi)`.
    pub fn antiderivative(&self, theta: f64) -> f64 {
        let t = normalize_angle(theta);
        self.alpha * t + self.periodic_phase(t)
    }

    /// `Phi(theta) - alpha theta`, the periodic part of the antiderivative.
    pub fn periodic_phase(&self, theta: f64) -> f64 {
        let t = normalize_angle(theta);
        let mut v = 0.0;
        for (k, (a, b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let kf = (k + 1) as f64;
            let kt = kf * t;
            v += (a * kt.sin() + b * (1.0 - kt.cos())) / kf;
        }
        v
    }
}

/// Signed `int_{theta1}^{theta2} A = Phi(theta2) - Phi(theta1)` on normalized
/// angles, without winding.
pub fn phase_integral(profile: &FluxProfile, theta1: f64, theta2: f64) -> f64 {
    profile.antiderivative(theta2) - profile.antiderivative(theta1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn alpha_of_simple_profiles() {
        assert_eq!(flux_alpha(&[0.3; 7]).unwrap(), 0.3);
        let s: Vec<f64> = (0..32).map(|i| (TAU * i as f64 / 32.0).sin()).collect();
        assert!(flux_alpha(&s).unwrap().abs() < 1e-15);
        let c: Vec<f64> = (0..64).map(|i| 0.3 + (2.0 * TAU * i as f64 / 64.0).cos()).collect();
        assert!((flux_alpha(&c).unwrap() - 0.3).abs() < 1e-12);
        assert!(flux_alpha(&[]).is_err());
    }

    #[test]
    fn phase_integral_examples() {
        let p = FluxProfile::constant(0.7);
        assert!((phase_integral(&p, 0.0, PI) - 0.7 * PI).abs() < 1e-15);
        assert_eq!(phase_integral(&p, 1.3, 1.3), 0.0);
        let s = FluxProfile::from_samples((0..16).map(|i| (TAU * i as f64 / 16.0).sin()).collect()).unwrap();
        assert!((phase_integral(&s, 0.0, FRAC_PI_2) - 1.0).abs() < 1e-10);
        assert_eq!(phase_integral(&s, 2.0, 2.0), 0.0);
    }

    #[test]
    fn antiderivative_closes_over_period() {
        let p = FluxProfile::from_coefficients(0.4, &[0.2, -0.1], &[0.3]).unwrap();
        let full = p.alpha * TAU + p.periodic_phase(TAU - 1e-15);
        assert!((full - TAU * 0.4).abs() < 1e-12);
        assert!((p.antiderivative(TAU - 1e-12) - TAU * 0.4).abs() < 1e-10);
        assert!((p.eval(1.0) - p.eval(1.0 + TAU)).abs() < 1e-14);
        assert_eq!(p.antiderivative(0.0), 0.0);
    }

    #[test]
    fn samples_reproduce_trig_polynomial() {
        let q = FluxProfile::from_coefficients(0.1, &[0.5, 0.0, 0.25], &[0.0, -0.75]).unwrap();
        let p = FluxProfile::from_samples(q.samples().to_vec()).unwrap();
        for i in 0..50 {
            let t = 0.123 * i as f64;
            assert!((p.eval(t) - q.eval(t)).abs() < 1e-13);
            assert!((p.antiderivative(t) - q.antiderivative(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn even_sample_count_keeps_nyquist_mode() {
        let s: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.5 } else { 0.5 }).collect();
        let p = FluxProfile::from_samples(s.clone()).unwrap();
        for (i, v) in s.iter().enumerate() {
            assert!((p.eval(TAU * i as f64 / 8.0) - v).abs() < 1e-13);
        }
        assert!((p.alpha() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn table_validation_and_resampling() {
        assert!(FluxProfile::from_table(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(FluxProfile::from_table(&[(0.0, 1.0), (7.0, 2.0)]).is_err());
        let rows: Vec<(f64, f64)> = [0.0, 0.5, 2.0, 4.0, 6.0].iter().map(|t| (*t, 0.25)).collect();
        let p = FluxProfile::from_table(&rows).unwrap();
        assert!((p.alpha() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn integer_flux_detection() {
        assert_eq!(FluxProfile::constant(-2.0).integer_flux(), Some(-2));
        assert_eq!(FluxProfile::constant(0.5).integer_flux(), None);
    }
}

//! Discretized operators on a polar grid.
//!
//! Functions live on midpoint radii `r_i = (i + 1/2) dr` and uniform angles
//! `theta_q = 2 pi q / n_theta`, with cell weights `r_i dr dtheta`.

mod apply;
mod oracle;

pub use apply::{apply_br, ApplyOutput, BrOperator, OperatorOptions};
pub use oracle::{free_kernel_oracle, free_multiplier_oracle, OracleOptions};

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::geometry::normalize_angle;

#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    radii: Vec<f64>,
    n_theta: usize,
    r_max: f64,
    dr: f64,
}

impl PolarGrid {
    /// `n_r` midpoint radii on `(0, r_max)` and `n_theta` (a power of two) angles.
    pub fn uniform(n_r: usize, n_theta: usize, r_max: f64) -> Result<Arc<Self>> {
        if n_r == 0 {
            return Err(invalid("grid needs at least one radius"));
        }
        if !n_theta.is_power_of_two() || n_theta < 2 {
            return Err(invalid(format!("n_theta must be a power of two >= 2, got {n_theta}")));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(invalid(format!("r_max must be positive, got {r_max}")));
        }
        let dr = r_max / n_r as f64;
        let radii = (0..n_r).map(|i| (i as f64 + 0.5) * dr).collect();
        Ok(Arc::new(PolarGrid { radii, n_theta, r_max, dr }))
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn n_r(&self) -> usize {
        self.radii.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    pub fn theta(&self, q: usize) -> f64 {
        TAU * q as f64 / self.n_theta as f64
    }

    /// Quadrature weight of every node on ring `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.radii[i] * self.dr * self.dtheta()
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> f64 {
        (0..self.n_r()).map(|i| self.weight(i) * self.n_theta as f64).sum()
    }
}

/// Complex values on a polar grid, row-major in `(radius, angle)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<PolarGrid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: Arc<PolarGrid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        GridFunction { grid, values }
    }

    pub fn from_values(grid: Arc<PolarGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples `f(r, theta)` at every node.
    pub fn from_fn(grid: Arc<PolarGrid>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &r in grid.radii() {
            for q in 0..grid.n_theta() {
                values.push(f(r, grid.theta(q)));
            }
        }
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn ring(&self, i: usize) -> &[Complex64] {
        let n = self.grid.n_theta();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn get(&self, i: usize, q: usize) -> Complex64 {
        self.values[i * self.grid.n_theta() + q]
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
            return Err(invalid("grid functions live on different grids"));
        }
        Ok(())
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(GridFunction { grid: self.grid.clone(), values })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(GridFunction { grid: self.grid.clone(), values })
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        GridFunction { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Rotation by `steps` grid angles: `(R f)(theta) = f(theta - steps dtheta)`.
    pub fn rotate(&self, steps: usize) -> GridFunction {
        let n = self.grid.n_theta();
        let mut values = self.values.clone();
        for i in 0..self.grid.n_r() {
            for q in 0..n {
                values[i * n + (q + steps) % n] = self.values[i * n + q];
            }
        }
        GridFunction { grid: self.grid.clone(), values }
    }

    /// Weighted inner product `sum w conj(f) g`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let n = self.grid.n_theta();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.grid.n_r() {
            let w = self.grid.weight(i);
            let ring: Complex64 = (0..n).map(|q| self.values[i * n + q].conj() * other.values[i * n + q]).sum();
            acc += w * ring;
        }
        Ok(acc)
    }
}

/// Weighted discrete `L^p` norm; `p = inf` gives the maximum modulus.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid(format!("p must be at least 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let n = f.grid.n_theta();
    let mut acc = 0.0;
    for i in 0..f.grid.n_r() {
        let ring: f64 = f.values[i * n..(i + 1) * n].iter().map(|v| v.norm().powf(p)).sum();
        acc += f.grid.weight(i) * ring;
    }
    Ok(acc.powf(1.0 / p))
}

/// Shapes whose indicator functions drive the experiments. Centres are
/// Cartesian; angles are in radians.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    Ball { center: (f64, f64), radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    Sector { r_in: f64, r_out: f64, theta_start: f64, theta_width: f64 },
    /// Rectangle of the given length along `direction` and width across it.
    Tube { center: (f64, f64), direction: f64, length: f64, width: f64 },
    /// A tube cut into stripes across its long axis: the points where
    /// `cos(2 pi t / period) >= 0`, `t` the coordinate along `direction`.
    Grating { center: (f64, f64), direction: f64, length: f64, width: f64, period: f64 },
}

impl ShapeSpec {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            ShapeSpec::Ball { center, radius } => (x - center.0).hypot(y - center.1) < radius,
            ShapeSpec::Annulus { r_in, r_out } => {
                let r = x.hypot(y);
                r >= r_in && r < r_out
            }
            ShapeSpec::Sector { r_in, r_out, theta_start, theta_width } => {
                let r = x.hypot(y);
                let t = normalize_angle(y.atan2(x) - theta_start);
                r >= r_in && r < r_out && t < theta_width
            }
            ShapeSpec::Tube { center, direction, length, width } => {
                let (t, n) = tube_coords(x - center.0, y - center.1, direction);
                t.abs() < 0.5 * length && n.abs() < 0.5 * width
            }
            ShapeSpec::Grating { center, direction, length, width, period } => {
                let (t, n) = tube_coords(x - center.0, y - center.1, direction);
                t.abs() < 0.5 * length && n.abs() < 0.5 * width && (TAU * t / period).cos() >= 0.0
            }
        }
    }

    /// The shape dilated by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> ShapeSpec {
        let c = |p: (f64, f64)| (p.0 * factor, p.1 * factor);
        match *self {
            ShapeSpec::Ball { center, radius } => ShapeSpec::Ball { center: c(center), radius: radius * factor },
            ShapeSpec::Annulus { r_in, r_out } => ShapeSpec::Annulus { r_in: r_in * factor, r_out: r_out * factor },
            ShapeSpec::Sector { r_in, r_out, theta_start, theta_width } => {
                ShapeSpec::Sector { r_in: r_in * factor, r_out: r_out * factor, theta_start, theta_width }
            }
            ShapeSpec::Tube { center, direction, length, width } => {
                ShapeSpec::Tube { center: c(center), direction, length: length * factor, width: width * factor }
            }
            ShapeSpec::Grating { center, direction, length, width, period } => ShapeSpec::Grating {
                center: c(center),
                direction,
                length: length * factor,
                width: width * factor,
                period: period * factor,
            },
        }
    }

    /// Exact area where it is elementary, for diagnostics.
    pub fn nominal_area(&self) -> f64 {
        match *self {
            ShapeSpec::Ball { radius, .. } => PI * radius * radius,
            ShapeSpec::Annulus { r_in, r_out } => PI * (r_out * r_out - r_in * r_in).max(0.0),
            ShapeSpec::Sector { r_in, r_out, theta_width, .. } => {
                0.5 * theta_width.min(TAU) * (r_out * r_out - r_in * r_in).max(0.0)
            }
            ShapeSpec::Tube { length, width, .. } => length * width,
            ShapeSpec::Grating { length, width, .. } => 0.5 * length * width,
        }
    }
}

fn tube_coords(dx: f64, dy: f64, direction: f64) -> (f64, f64) {
    let (s, c) = direction.sin_cos();
    (dx * c + dy * s, -dx * s + dy * c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Indicator {
    pub function: GridFunction,
    /// `|E|` by weight summation.
    pub measure: f64,
    pub active_nodes: usize,
    /// Set when no node falls inside the shape.
    pub empty: bool,
}

/// Node-wise 0/1 samples of the shape's indicator.
pub fn make_indicator(grid: Arc<PolarGrid>, shape: &ShapeSpec) -> Indicator {
    let n = grid.n_theta();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut measure = 0.0;
    let mut active = 0;
    for (i, &r) in grid.radii().iter().enumerate() {
        for q in 0..n {
            let (s, c) = grid.theta(q).sin_cos();
            if shape.contains(r * c, r * s) {
                values[i * n + q] = Complex64::new(1.0, 0.0);
                measure += grid.weight(i);
                active += 1;
            }
        }
    }
    Indicator { function: GridFunction { grid, values }, measure, active_nodes: active, empty: active == 0 }
}

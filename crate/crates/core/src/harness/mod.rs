//! Verification harness: boundedness-region geometry, numerical bound
//! suites, operator-norm ratio sweeps and the truncation stability experiment.

mod region;
mod stability;
mod suites;
mod sweep;

pub use region::{region_membership, region_vertices, Membership, RegionPoint, RegionVertices};
pub use stability::{stability_experiment, JumpKind, StabilityConfig, StabilityReport, StabilityRow};
pub use suites::{verify_bounds, Suite, VerifyConfig};
pub use sweep::{
    ratio_sweep, ratio_sweep_free, ratio_sweep_with, scaling_regression, Family, GridConfig, RatioSweep, ScaleSample,
    ScalingFit, SweepEngine, MIN_ACTIVE_NODES,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One measured constant checked against a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub measured_constant: f64,
    pub samples: usize,
    pub passed: bool,
    pub threshold: f64,
}

impl BoundReport {
    /// `passed` is set from `measured <= threshold`; non-finite values fail.
    pub fn new(name: impl Into<String>, parameters: &[(&str, f64)], measured: f64, samples: usize, threshold: f64) -> Self {
        BoundReport {
            name: name.into(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            measured_constant: measured,
            samples,
            passed: measured.is_finite() && measured <= threshold,
            threshold,
        }
    }
}

/// Radical-inverse sequence in `base`; deterministic low-discrepancy samples.
pub(crate) fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `max / min` of positive values; infinite if any is zero or not finite.
pub(crate) fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || !max.is_finite() {
        return f64::INFINITY;
    }
    max / min
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

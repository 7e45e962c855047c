use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{fit_slope, RegionPoint};
use crate::error::{invalid, Result};
use crate::geometry::FluxProfile;
use crate::kernels::KernelParams;
use crate::operator::{
    free_multiplier_oracle, lp_norm, make_indicator, BrOperator, GridFunction, OracleOptions, PolarGrid, ShapeSpec,
};

/// Fewer active nodes than this and a scale is considered unresolved.
pub const MIN_ACTIVE_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n_r: 256, n_theta: 256, r_max: 40.0 }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Arc<PolarGrid>> {
        PolarGrid::uniform(self.n_r, self.n_theta, self.r_max)
    }
}

/// Indicator families indexed by a dyadic scale `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Centred discs of radius `s / 2`.
    Balls,
    /// `s/2 <= |x| < s/2 + 1`.
    UnitAnnuli,
    /// Width `1 / s` around the unit circle.
    ShrinkingAnnuli,
    /// Rectangles `s x sqrt(s)`.
    Tubes,
    /// Rectangles `2 pi s x sqrt(2 pi s)` cut into stripes across the long
    /// axis with wavenumber `1 - 1/(2 pi s)`: their Fourier mass sits just
    /// inside the unit circle, at distance comparable to the inverse length.
    Gratings,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Balls, Family::UnitAnnuli, Family::ShrinkingAnnuli, Family::Tubes, Family::Gratings];

    pub fn shape(self, s: f64) -> ShapeSpec {
        match self {
            Family::Balls => ShapeSpec::Ball { center: (0.0, 0.0), radius: 0.5 * s },
            Family::UnitAnnuli => ShapeSpec::Annulus { r_in: 0.5 * s, r_out: 0.5 * s + 1.0 },
            Family::ShrinkingAnnuli => ShapeSpec::Annulus { r_in: 1.0 - 0.5 / s, r_out: 1.0 + 0.5 / s },
            Family::Tubes => ShapeSpec::Tube { center: (0.0, 0.0), direction: 0.0, length: s, width: s.sqrt() },
            Family::Gratings => {
                let length = TAU * s;
                ShapeSpec::Grating {
                    center: (0.0, 0.0),
                    direction: 0.0,
                    length,
                    width: length.sqrt(),
                    period: TAU / (1.0 - 1.0 / length),
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Balls => "balls",
            Family::UnitAnnuli => "unit_annuli",
            Family::ShrinkingAnnuli => "shrinking_annuli",
            Family::Tubes => "tubes",
            Family::Gratings => "gratings",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.iter().copied().find(|f| f.name() == s).ok_or_else(|| invalid(format!("unknown family '{s}'")))
    }
}

/// How `S` is applied during a sweep.
pub enum SweepEngine<'a> {
    Operator(&'a BrOperator),
    /// Free case only: the Cartesian FFT multiplier.
    FreeOracle { delta: f64, lambda: f64, grid: Arc<PolarGrid>, options: OracleOptions },
}

impl SweepEngine<'_> {
    fn grid(&self) -> &Arc<PolarGrid> {
        match self {
            SweepEngine::Operator(op) => op.grid(),
            SweepEngine::FreeOracle { grid, .. } => grid,
        }
    }

    fn delta(&self) -> f64 {
        match self {
            SweepEngine::Operator(op) => op.params().delta,
            SweepEngine::FreeOracle { delta, .. } => *delta,
        }
    }

    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        match self {
            SweepEngine::Operator(op) => Ok(op.apply(f)?.result),
            SweepEngine::FreeOracle { delta, lambda, options, .. } => free_multiplier_oracle(*delta, *lambda, f, *options),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSample {
    pub scale: f64,
    pub measure: f64,
    pub active_nodes: usize,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSweep {
    pub delta: f64,
    pub region_point: RegionPoint,
    pub family: Family,
    /// Scales that were resolved, in input order.
    pub scales: Vec<f64>,
    /// `||S chi_E||_q / ||chi_E||_p` per resolved scale.
    pub ratios: Vec<f64>,
    /// Slope of `log ratio` against `log |E|`.
    pub slope: f64,
    pub samples: Vec<ScaleSample>,
    /// Skipped scales with the reason.
    pub warnings: Vec<String>,
}

fn check_scales(scales: &[f64]) -> Result<()> {
    for &s in scales {
        if !(s > 0.0) || (s.log2() - s.log2().round()).abs() > 1e-12 {
            return Err(invalid(format!("scales must be powers of two, got {s}")));
        }
    }
    Ok(())
}

/// Operator-norm ratios over a family of indicators using a prepared engine.
pub fn ratio_sweep_with(engine: &SweepEngine<'_>, pt: RegionPoint, family: Family, scales: &[f64]) -> Result<RatioSweep> {
    check_scales(scales)?;
    let grid = engine.grid().clone();
    let (p, q) = (pt.p(), pt.q());
    let mut out = RatioSweep {
        delta: engine.delta(),
        region_point: pt,
        family,
        scales: Vec::new(),
        ratios: Vec::new(),
        slope: f64::NAN,
        samples: Vec::new(),
        warnings: Vec::new(),
    };
    for &s in scales {
        let ind = make_indicator(grid.clone(), &family.shape(s));
        if ind.active_nodes < MIN_ACTIVE_NODES {
            out.warnings.push(format!("scale {s}: {} active nodes, skipped as unresolved", ind.active_nodes));
            continue;
        }
        let input_norm = lp_norm(&ind.function, p)?;
        let output_norm = lp_norm(&engine.apply(&ind.function)?, q)?;
        if !(output_norm > 0.0) || !(input_norm > 0.0) {
            out.warnings.push(format!("scale {s}: zero norm, ratio undefined, skipped"));
            continue;
        }
        let ratio = output_norm / input_norm;
        out.samples.push(ScaleSample {
            scale: s,
            measure: ind.measure,
            active_nodes: ind.active_nodes,
            input_norm,
            output_norm,
            ratio,
        });
        out.scales.push(s);
        out.ratios.push(ratio);
    }
    if out.samples.len() >= 2 {
        let x: Vec<f64> = out.samples.iter().map(|v| v.measure.ln()).collect();
        let y: Vec<f64> = out.ratios.iter().map(|r| r.ln()).collect();
        out.slope = fit_slope(&x, &y);
    } else {
        out.warnings.push("fewer than two resolved scales; slope undefined".into());
    }
    Ok(out)
}

/// Builds `S` at `lambda = 1` on the configured grid and sweeps one family.
/// `delta_signed` lies in `(-3/2, 0)`.
pub fn ratio_sweep(
    delta_signed: f64,
    profile: FluxProfile,
    pt: RegionPoint,
    family: Family,
    scales: &[f64],
    grid_cfg: &GridConfig,
) -> Result<RatioSweep> {
    if !(delta_signed > -1.5 && delta_signed < 0.0) {
        return Err(invalid(format!("delta must lie in (-3/2, 0), got {delta_signed}")));
    }
    let op = BrOperator::new(KernelParams::new(delta_signed, 1.0, profile)?, grid_cfg.build()?)?;
    ratio_sweep_with(&SweepEngine::Operator(&op), pt, family, scales)
}

/// Same sweep through the free-space FFT oracle (flux zero).
pub fn ratio_sweep_free(
    delta_signed: f64,
    pt: RegionPoint,
    family: Family,
    scales: &[f64],
    grid_cfg: &GridConfig,
    options: OracleOptions,
) -> Result<RatioSweep> {
    let engine = SweepEngine::FreeOracle { delta: delta_signed, lambda: 1.0, grid: grid_cfg.build()?, options };
    ratio_sweep_with(&engine, pt, family, scales)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub lambdas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub exponent: f64,
    /// `2 (1/p - 1/q)`.
    pub target: f64,
}

/// Fits `log(||S_lambda f_lambda||_q / ||f_lambda||_p)` against `log lambda`,
/// with `f_lambda = chi_{E / lambda}` on a grid shrunk by `lambda`, so that
/// the discrete problem is an exact dilation of the `lambda = 1` one.
pub fn scaling_regression(
    delta_signed: f64,
    profile: FluxProfile,
    pt: RegionPoint,
    shape: &ShapeSpec,
    lambdas: &[f64],
    grid_cfg: &GridConfig,
) -> Result<ScalingFit> {
    if lambdas.len() < 3 {
        return Err(invalid("scaling fit needs at least three values of lambda"));
    }
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 4.0 - 1e-12 {
        return Err(invalid("lambda values must be positive and span at least two octaves"));
    }
    let mut ratios = Vec::new();
    for &lam in lambdas {
        let grid = PolarGrid::uniform(grid_cfg.n_r, grid_cfg.n_theta, grid_cfg.r_max / lam)?;
        let op = BrOperator::new(KernelParams::new(delta_signed, lam, profile.clone())?, grid.clone())?;
        let ind = make_indicator(grid, &shape.scaled(1.0 / lam));
        if ind.empty {
            return Err(invalid("shape has no nodes on the grid"));
        }
        let out = op.apply(&ind.function)?.result;
        ratios.push(lp_norm(&out, pt.q())? / lp_norm(&ind.function, pt.p())?);
    }
    let x: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    Ok(ScalingFit {
        lambdas: lambdas.to_vec(),
        ratios,
        exponent: fit_slope(&x, &y),
        target: 2.0 * (pt.inv_p - pt.inv_q),
    })
}

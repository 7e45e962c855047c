use std::collections::BTreeMap;
use std::path::Path;

use magbr::geometry::PolarPoint;
use magbr::harness::{
    ratio_sweep_with, region_membership, region_vertices, scaling_regression, stability_experiment, verify_bounds,
    BoundReport, Family, RatioSweep, RegionPoint, Suite, SweepEngine,
};
use magbr::kernels::{br_kernel, spectral_measure_kernel};
use magbr::operator::{
    free_multiplier_oracle, lp_norm, make_indicator, BrOperator, GridFunction, PolarGrid, ShapeSpec,
};
use magbr::specialfn::bessel_j;
use magbr::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::Loaded;
use crate::error::{CliError, CliResult};
use crate::output::Run;
use crate::{Cli, Command, Engine, GridArgs, KernelArgs};

/// Runs one subcommand. `Ok(false)` means a verification failed.
pub fn run(cli: &Cli) -> CliResult<bool> {
    let mut loaded = Loaded::read(cli.config.as_deref())?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::KernelEval { kernel, x, y, pairs, spectral } => {
            apply_kernel_args(&mut loaded, kernel);
            kernel_eval(&loaded, out, x.as_deref(), y.as_deref(), pairs.as_deref(), *spectral)
        }
        Command::Apply { kernel, grid, input, shape, gaussian, oracle } => {
            apply_kernel_args(&mut loaded, kernel);
            apply_grid_args(&mut loaded, grid);
            let source = Source::pick(input.as_deref(), shape.as_deref(), *gaussian)?;
            apply(&loaded, out, source, *oracle)
        }
        Command::Verify { suites } => verify(&loaded, out, suites),
        Command::RatioSweep { kernel, grid, point, families, scales, engine } => {
            apply_kernel_args(&mut loaded, kernel);
            apply_grid_args(&mut loaded, grid);
            if let Some(s) = scales {
                loaded.config.sweep.scales = s.clone();
            }
            let families = if families.is_empty() { vec![Family::Balls, Family::UnitAnnuli] } else { families.clone() };
            ratio_sweep(&loaded, out, region_point(point)?, &families, *engine)
        }
        Command::ScalingFit { kernel, grid, point, lambdas, shape } => {
            apply_kernel_args(&mut loaded, kernel);
            apply_grid_args(&mut loaded, grid);
            if let Some(l) = lambdas {
                loaded.config.sweep.lambdas = l.clone();
            }
            let shape = match shape {
                Some(s) => parse_shape(s)?,
                None => ShapeSpec::Ball { center: (0.0, 0.0), radius: 1.0 },
            };
            scaling_fit(&loaded, out, region_point(point)?, &shape)
        }
        Command::Stability { lambda, m, jump } => {
            let cfg = &mut loaded.config.stability;
            if let Some(l) = lambda {
                cfg.lambda = *l;
            }
            if let Some(m) = m {
                cfg.m_list = m.clone();
            }
            if let Some(j) = jump {
                cfg.jump = (*j).into();
            }
            stability(&loaded, out)
        }
        Command::Region { delta, point } => region(out, *delta, region_point(point)?),
        Command::BesselTable { nu, r_min, r_max, count, log } => bessel_table(out, nu, *r_min, *r_max, *count, *log),
    }
}

fn apply_kernel_args(loaded: &mut Loaded, k: &KernelArgs) {
    let c = &mut loaded.config;
    if let Some(d) = k.delta {
        c.kernel.delta = d;
    }
    if let Some(l) = k.lambda {
        c.kernel.lambda = l;
    }
    if let Some(t) = k.tol {
        c.kernel.tol = t;
    }
    if let Some(a) = k.alpha {
        c.flux = crate::config::FluxSection { alpha: Some(a), ..Default::default() };
    }
}

fn apply_grid_args(loaded: &mut Loaded, g: &GridArgs) {
    let grid = &mut loaded.config.grid;
    if let Some(n) = g.n_r {
        grid.n_r = n;
    }
    if let Some(n) = g.n_theta {
        grid.n_theta = n;
    }
    if let Some(r) = g.r_max {
        grid.r_max = r;
    }
}

fn region_point(v: &[f64]) -> CliResult<RegionPoint> {
    match v {
        [p, q] => Ok(RegionPoint::new(*p, *q)?),
        _ => Err(CliError::Input("a point needs exactly two coordinates".into())),
    }
}

fn parse_shape(s: &str) -> CliResult<ShapeSpec> {
    serde_json::from_str(s).map_err(|e| CliError::Input(format!("bad shape '{s}': {e}")))
}

fn polar(v: Option<&[f64]>, name: &str) -> CliResult<PolarPoint> {
    match v {
        Some([r, t]) => Ok(PolarPoint::new(*r, *t)?),
        _ => Err(CliError::Input(format!("--{name} R THETA is required without --pairs"))),
    }
}

#[derive(Debug, Deserialize)]
struct PairRow {
    r1: f64,
    theta1: f64,
    r2: f64,
    theta2: f64,
}

#[derive(Debug, Serialize)]
struct KernelRow {
    r1: f64,
    theta1: f64,
    r2: f64,
    theta2: f64,
    re: f64,
    im: f64,
    abs: f64,
    geometric_re: f64,
    geometric_im: f64,
    diffractive_re: f64,
    diffractive_im: f64,
    abs_error_estimate: f64,
}

fn kernel_eval(
    loaded: &Loaded,
    out: &Path,
    x: Option<&[f64]>,
    y: Option<&[f64]>,
    pairs: Option<&Path>,
    spectral: bool,
) -> CliResult<bool> {
    let params = loaded.kernel_params()?;
    let points: Vec<(PolarPoint, PolarPoint)> = match pairs {
        Some(path) => {
            let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
            let mut v = Vec::new();
            for row in rdr.deserialize() {
                let row: PairRow = row?;
                v.push((PolarPoint::new(row.r1, row.theta1)?, PolarPoint::new(row.r2, row.theta2)?));
            }
            v
        }
        None => vec![(polar(x, "x")?, polar(y, "y")?)],
    };
    let eval = if spectral { spectral_measure_kernel } else { br_kernel };
    let mut rows = Vec::with_capacity(points.len());
    for (a, b) in points {
        let k = eval(&params, a, b)?;
        rows.push(KernelRow {
            r1: a.r,
            theta1: a.theta,
            r2: b.r,
            theta2: b.theta,
            re: k.value.re,
            im: k.value.im,
            abs: k.value.norm(),
            geometric_re: k.geometric.re,
            geometric_im: k.geometric.im,
            diffractive_re: k.diffractive.re,
            diffractive_im: k.diffractive.im,
            abs_error_estimate: k.abs_error_estimate,
        });
    }
    if let [row] = rows.as_slice() {
        println!("K = {:+.12e} {:+.12e}i  (error estimate {:.1e})", row.re, row.im, row.abs_error_estimate);
    } else {
        println!("{} kernel values", rows.len());
    }
    let max_err = rows.iter().map(|r| r.abs_error_estimate).fold(0.0, f64::max);
    let mut run = Run::start("kernel-eval", out, json!({ "kernel": &loaded.config.kernel, "flux": &loaded.config.flux, "spectral": spectral }))?;
    let count = rows.len();
    run.table("kernel-eval.csv", rows)?;
    run.finish(None, json!({ "pairs": count, "max_abs_error_estimate": max_err }))?;
    Ok(true)
}

enum Source<'a> {
    Input(&'a Path),
    Shape(ShapeSpec),
    Gaussian(f64),
}

impl<'a> Source<'a> {
    fn pick(input: Option<&'a Path>, shape: Option<&str>, gaussian: Option<f64>) -> CliResult<Self> {
        match (input, shape, gaussian) {
            (Some(p), None, None) => Ok(Source::Input(p)),
            (None, Some(s), None) => Ok(Source::Shape(parse_shape(s)?)),
            (None, None, Some(w)) if w > 0.0 => Ok(Source::Gaussian(w)),
            (None, None, Some(w)) => Err(CliError::Input(format!("Gaussian width must be positive, got {w}"))),
            _ => Err(CliError::Input("give exactly one of --input, --shape, --gaussian".into())),
        }
    }

    fn build(&self, grid: &std::sync::Arc<PolarGrid>) -> CliResult<GridFunction> {
        match self {
            Source::Input(path) => read_grid_function(grid, path),
            Source::Shape(shape) => {
                let ind = make_indicator(grid.clone(), shape);
                if ind.empty {
                    return Err(CliError::Input("the shape contains no grid node".into()));
                }
                Ok(ind.function)
            }
            Source::Gaussian(w) => {
                let w = *w;
                Ok(GridFunction::from_fn(grid.clone(), move |r, _| Complex64::new((-r * r / (2.0 * w * w)).exp(), 0.0)))
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRow {
    r: f64,
    theta: f64,
    re: f64,
    im: f64,
}

/// Places each CSV row on the nearest grid node; rows off the grid are errors.
fn read_grid_function(grid: &std::sync::Arc<PolarGrid>, path: &Path) -> CliResult<GridFunction> {
    let mut f = GridFunction::zeros(grid.clone());
    let n_theta = grid.n_theta();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    for (line, row) in rdr.deserialize().enumerate() {
        let row: NodeRow = row?;
        let i = (row.r / grid.dr() - 0.5).round();
        let q = (row.theta.rem_euclid(std::f64::consts::TAU) / grid.dtheta()).round();
        let off_grid = (row.r - grid.dr() * (i + 0.5)).abs() > 1e-6 * grid.dr()
            || i < 0.0
            || i as usize >= grid.n_r()
            || (row.theta.rem_euclid(std::f64::consts::TAU) - q * grid.dtheta()).abs() > 1e-6 * grid.dtheta();
        if off_grid {
            return Err(CliError::Input(format!("row {}: ({}, {}) is not a grid node", line + 1, row.r, row.theta)));
        }
        let idx = i as usize * n_theta + (q as usize % n_theta);
        f.values_mut()[idx] = Complex64::new(row.re, row.im);
    }
    Ok(f)
}

fn grid_rows(f: &GridFunction) -> impl Iterator<Item = NodeRow> + '_ {
    let grid = f.grid();
    (0..grid.n_r()).flat_map(move |i| {
        (0..grid.n_theta()).map(move |q| {
            let v = f.get(i, q);
            NodeRow { r: grid.radii()[i], theta: grid.theta(q), re: v.re, im: v.im }
        })
    })
}

fn apply(loaded: &Loaded, out: &Path, source: Source<'_>, oracle: bool) -> CliResult<bool> {
    let params = loaded.kernel_params()?;
    let grid = loaded.config.grid.build()?;
    let f = source.build(&grid)?;
    let mut run = Run::start(
        "apply",
        out,
        json!({ "kernel": &loaded.config.kernel, "flux": &loaded.config.flux, "grid": &loaded.config.grid }),
    )?;
    let t = std::time::Instant::now();
    let op = BrOperator::new(params.clone(), grid)?;
    let build_seconds = t.elapsed().as_secs_f64();
    let t = std::time::Instant::now();
    let result = op.apply(&f)?;
    let apply_seconds = t.elapsed().as_secs_f64();
    let mut results = json!({
        "build_seconds": build_seconds,
        "apply_seconds": apply_seconds,
        "max_abs_error": result.max_error(),
        "input_l2": lp_norm(&f, 2.0)?,
        "output_l2": lp_norm(&result.result, 2.0)?,
    });
    if oracle {
        if params.profile.alpha() != 0.0 || !params.profile.is_constant() {
            return Err(CliError::Input("--oracle needs zero flux".into()));
        }
        let reference = free_multiplier_oracle(params.delta, params.lambda, &f, loaded.config.oracle.into())?;
        let rel = lp_norm(&result.result.sub(&reference)?, 2.0)? / lp_norm(&reference, 2.0)?;
        println!("relative L2 difference to the free oracle: {rel:.3e}");
        results["oracle_relative_l2"] = json!(rel);
        run.table("apply-oracle.csv", grid_rows(&reference))?;
    }
    run.table("apply.csv", grid_rows(&result.result))?;
    println!("applied on {} nodes, max error estimate {:.2e}", f.values().len(), result.max_error());
    run.finish(None, results)?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct ReportRow<'a> {
    suite: &'a str,
    name: &'a str,
    parameters: String,
    measured_constant: f64,
    threshold: f64,
    samples: usize,
    passed: bool,
}

fn verify(loaded: &Loaded, out: &Path, suites: &[Suite]) -> CliResult<bool> {
    let suites = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let cfg = &loaded.config.verify;
    let mut run = Run::start("verify", out, json!({ "suites": &suites, "config": cfg }))?;
    let mut all: Vec<(Suite, BoundReport)> = Vec::new();
    for &suite in &suites {
        let reports = verify_bounds(suite, cfg)?;
        let ok = reports.iter().all(|r| r.passed);
        println!("{:<11} {}", suite.name(), if ok { "PASS" } else { "FAIL" });
        for r in &reports {
            if !r.passed {
                println!("    {} {} = {:.4} > {}", r.name, fmt_params(&r.parameters), r.measured_constant, r.threshold);
            }
        }
        all.extend(reports.into_iter().map(|r| (suite, r)));
    }
    let passed = all.iter().all(|(_, r)| r.passed);
    run.table(
        "verify.csv",
        all.iter().map(|(s, r)| ReportRow {
            suite: s.name(),
            name: &r.name,
            parameters: fmt_params(&r.parameters),
            measured_constant: r.measured_constant,
            threshold: r.threshold,
            samples: r.samples,
            passed: r.passed,
        }),
    )?;
    let reports: Vec<&BoundReport> = all.iter().map(|(_, r)| r).collect();
    run.finish(Some(passed), reports)?;
    Ok(passed)
}

fn fmt_params(p: &BTreeMap<String, f64>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Serialize)]
struct SweepRow<'a> {
    family: &'a str,
    scale: f64,
    measure: f64,
    active_nodes: usize,
    input_norm: f64,
    output_norm: f64,
    ratio: f64,
}

fn ratio_sweep(loaded: &Loaded, out: &Path, pt: RegionPoint, families: &[Family], engine: Engine) -> CliResult<bool> {
    let params = loaded.kernel_params()?;
    let grid = loaded.config.grid.build()?;
    let scales = &loaded.config.sweep.scales;
    let op;
    let eng = match engine {
        Engine::Operator => {
            op = BrOperator::new(params.clone(), grid)?;
            SweepEngine::Operator(&op)
        }
        Engine::Oracle => {
            if params.profile.alpha() != 0.0 || !params.profile.is_constant() {
                return Err(CliError::Input("the oracle engine needs zero flux".into()));
            }
            SweepEngine::FreeOracle {
                delta: params.delta,
                lambda: params.lambda,
                grid,
                options: loaded.config.oracle.into(),
            }
        }
    };
    let mut sweeps: Vec<RatioSweep> = Vec::new();
    for &family in families {
        let s = ratio_sweep_with(&eng, pt, family, scales)?;
        println!("{:<16} slope {:+.4}  ratios {:?}", family.name(), s.slope, s.ratios);
        for w in &s.warnings {
            println!("    warning: {w}");
        }
        sweeps.push(s);
    }
    let membership = if params.delta < 0.0 && params.delta > -1.5 {
        Some(region_membership(-params.delta, pt)?)
    } else {
        None
    };
    let mut run = Run::start(
        "ratio-sweep",
        out,
        json!({ "kernel": &loaded.config.kernel, "flux": &loaded.config.flux, "grid": &loaded.config.grid,
                "point": pt, "scales": scales, "engine": format!("{engine:?}").to_lowercase() }),
    )?;
    run.table(
        "ratio-sweep.csv",
        sweeps.iter().flat_map(|s| {
            s.samples.iter().map(move |v| SweepRow {
                family: s.family.name(),
                scale: v.scale,
                measure: v.measure,
                active_nodes: v.active_nodes,
                input_norm: v.input_norm,
                output_norm: v.output_norm,
                ratio: v.ratio,
            })
        }),
    )?;
    let summary: Vec<_> = sweeps
        .iter()
        .map(|s| json!({ "family": s.family.name(), "slope": s.slope, "warnings": s.warnings }))
        .collect();
    run.finish(None, json!({ "membership": membership, "sweeps": summary }))?;
    Ok(true)
}

fn scaling_fit(loaded: &Loaded, out: &Path, pt: RegionPoint, shape: &ShapeSpec) -> CliResult<bool> {
    let k = &loaded.config.kernel;
    let lambdas = &loaded.config.sweep.lambdas;
    let fit = scaling_regression(k.delta, loaded.profile()?, pt, shape, lambdas, &loaded.config.grid)?;
    println!("exponent {:.4} (dilation target {:.4})", fit.exponent, fit.target);
    let mut run = Run::start(
        "scaling-fit",
        out,
        json!({ "kernel": k, "flux": &loaded.config.flux, "grid": &loaded.config.grid, "point": pt, "shape": shape }),
    )?;
    #[derive(Serialize)]
    struct Row {
        lambda: f64,
        ratio: f64,
    }
    run.table("scaling-fit.csv", fit.lambdas.iter().zip(&fit.ratios).map(|(&lambda, &ratio)| Row { lambda, ratio }))?;
    run.finish(None, json!({ "exponent": fit.exponent, "target": fit.target }))?;
    Ok(true)
}

fn stability(loaded: &Loaded, out: &Path) -> CliResult<bool> {
    let cfg = &loaded.config.stability;
    let report = stability_experiment(cfg)?;
    for row in &report.rows {
        println!(
            "M = {:>5}  remainder {:.4e}  proxy {:.4}{}",
            row.m,
            row.remainder_ratio,
            row.truncated_norm_proxy,
            if row.saturated { "  (saturated)" } else { "" }
        );
    }
    println!("decreasing: {}  log-growth slope {:.4}", report.decreasing, report.log_growth_slope);
    let mut run = Run::start("stability", out, cfg)?;
    run.table("stability.csv", &report.rows)?;
    run.finish(None, json!({ "decreasing": report.decreasing, "log_growth_slope": report.log_growth_slope,
                              "saturation_flagged": report.saturation_flagged }))?;
    Ok(true)
}

fn region(out: &Path, delta: f64, pt: RegionPoint) -> CliResult<bool> {
    let membership = region_membership(delta, pt)?;
    let vertices = region_vertices(delta)?;
    println!("({}, {}) at delta = {delta}: {membership:?}", pt.inv_p, pt.inv_q);
    let run = Run::start("region", out, json!({ "delta": delta, "point": pt }))?;
    run.finish(None, json!({ "membership": membership, "member": membership.is_member(), "vertices": vertices }))?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct BesselRow {
    nu: f64,
    r: f64,
    value: f64,
    err: f64,
}

fn bessel_table(out: &Path, nu: &[f64], r_min: f64, r_max: f64, count: usize, log: bool) -> CliResult<bool> {
    if !(r_min >= 0.0 && r_max > r_min) || count < 2 || (log && r_min == 0.0) {
        return Err(CliError::Input("need 0 <= r_min < r_max, count >= 2, and r_min > 0 for --log".into()));
    }
    let radii: Vec<f64> = (0..count)
        .map(|k| {
            let t = k as f64 / (count - 1) as f64;
            if log {
                r_min * (r_max / r_min).powf(t)
            } else {
                r_min + (r_max - r_min) * t
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(nu.len() * count);
    for &n in nu {
        for &r in &radii {
            let e = bessel_j(n, r)?;
            rows.push(BesselRow { nu: n, r, value: e.value, err: e.abs_error_estimate });
        }
    }
    let mut run = Run::start("bessel-table", out, json!({ "nu": nu, "r_min": r_min, "r_max": r_max, "count": count, "log": log }))?;
    let n = rows.len();
    let path = run.table("bessel-table.csv", rows)?;
    println!("{n} values written to {}", path.display());
    run.finish(None, json!({ "rows": n }))?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use magbr::geometry::FluxProfile;

    #[test]
    fn sources_are_exclusive() {
        assert!(Source::pick(None, None, None).is_err());
        assert!(Source::pick(Some(Path::new("a.csv")), None, Some(1.0)).is_err());
        assert!(Source::pick(None, None, Some(-1.0)).is_err());
        assert!(matches!(Source::pick(None, Some(r#"{"kind":"annulus","r_in":1,"r_out":2}"#), None), Ok(Source::Shape(_))));
    }

    #[test]
    fn node_rows_round_trip() {
        let grid = PolarGrid::uniform(4, 8, 2.0).unwrap();
        let f = GridFunction::from_fn(grid.clone(), Complex64::new);
        let dir = std::env::temp_dir().join(format!("magbr-rt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f.csv");
        let mut w = csv::Writer::from_path(&path).unwrap();
        for row in grid_rows(&f) {
            w.serialize(row).unwrap();
        }
        w.flush().unwrap();
        let g = read_grid_function(&grid, &path).unwrap();
        assert_eq!(f.values(), g.values());
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn alpha_flag_replaces_profile() {
        let mut loaded = Loaded::read(None).unwrap();
        loaded.config.flux.cos = vec![0.2];
        apply_kernel_args(&mut loaded, &KernelArgs { alpha: Some(0.4), ..Default::default() });
        let p: FluxProfile = loaded.profile().unwrap();
        assert!(p.is_constant() && p.alpha() == 0.4);
    }
}

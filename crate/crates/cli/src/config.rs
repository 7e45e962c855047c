//! TOML run configuration. Every section is optional; command-line flags
//! override the values read here.

use std::path::{Path, PathBuf};

use magbr::geometry::FluxProfile;
use magbr::harness::{GridConfig, StabilityConfig, VerifyConfig};
use magbr::kernels::KernelParams;
use magbr::operator::OracleOptions;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub kernel: KernelSection,
    pub flux: FluxSection,
    pub grid: GridConfig,
    pub oracle: OracleSection,
    pub sweep: SweepSection,
    pub verify: VerifyConfig,
    pub stability: StabilityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    /// Signed order, in `(-3/2, 0)` for the negative-order regime.
    pub delta: f64,
    pub lambda: f64,
    pub tol: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { delta: -0.5, lambda: 1.0, tol: 1e-10 }
    }
}

/// Flux profile: a constant `alpha`, a Fourier series, or a `theta,value` CSV.
/// The first of `csv`, coefficients and `alpha` that is present wins.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluxSection {
    pub alpha: Option<f64>,
    pub a0: Option<f64>,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub csv: Option<PathBuf>,
}

impl FluxSection {
    pub fn profile(&self, base: &Path) -> CliResult<FluxProfile> {
        if let Some(path) = &self.csv {
            return Ok(FluxProfile::from_csv(base.join(path))?);
        }
        if self.a0.is_some() || !self.cos.is_empty() || !self.sin.is_empty() {
            let a0 = self.a0.or(self.alpha).unwrap_or(0.0);
            return Ok(FluxProfile::from_coefficients(a0, &self.cos, &self.sin)?);
        }
        Ok(FluxProfile::constant(self.alpha.unwrap_or(0.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub padding: f64,
    pub n_fft: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        let d = OracleOptions::default();
        OracleSection { padding: d.padding, n_fft: d.n_fft }
    }
}

impl From<OracleSection> for OracleOptions {
    fn from(s: OracleSection) -> Self {
        OracleOptions { padding: s.padding, n_fft: s.n_fft }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub scales: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { scales: (0..=5).map(|k| f64::from(1u32 << k)).collect(), lambdas: vec![1.0, 2.0, 4.0] }
    }
}

/// Loaded configuration plus the directory relative paths resolve against.
pub struct Loaded {
    pub config: Config,
    pub base: PathBuf,
}

impl Loaded {
    pub fn read(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Loaded { config: Config::default(), base: PathBuf::from(".") }),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", p.display())))?;
                let config = toml::from_str(&text)?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
                Ok(Loaded { config, base })
            }
        }
    }

    pub fn profile(&self) -> CliResult<FluxProfile> {
        self.config.flux.profile(&self.base)
    }

    pub fn kernel_params(&self) -> CliResult<KernelParams> {
        let k = &self.config.kernel;
        Ok(KernelParams::new(k.delta, k.lambda, self.profile()?)?.with_tol(k.tol)?)
    }
}

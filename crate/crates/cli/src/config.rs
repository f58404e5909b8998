//! Run configuration in TOML with one table per concern.
//!
//! ```toml
//! [grid]
//! n = 128
//! length = 6.283185307179586
//!
//! [coefficients]
//! alpha1 = 0.0
//! alpha2 = -1.0
//! alpha3 = 2.0
//! alpha4 = 2.0
//! alpha5 = 0.0
//! alpha6 = 1.0
//! gamma = 0.5
//! reynolds = 10.0
//! k1 = 0.25
//! k2 = 0.3
//! k3 = 0.2
//!
//! [solver]
//! dt = 1e-3
//! t_end = 1.0
//!
//! [initial]
//! preset = "twist"
//! amplitude = 0.5
//! ```
//!
//! Unknown keys are rejected. `[coefficients]` is always required; `[solver]`
//! and `[initial]` are required by `run`.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use elsim_core::coefficients::{admissibility_margin_2d, admissible};
use elsim_core::{Dim, ElasticConstants, Grid, LeslieCoefficients, Model, Scheme, SolverConfig, Viscosities};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridConfig,
    pub coefficients: CoefficientConfig,
    pub solver: Option<SolverSection>,
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub monitors: MonitorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
}

fn default_length() -> f64 {
    TAU
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 64, length: TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    pub alpha5: f64,
    pub alpha6: f64,
    pub gamma: f64,
    pub reynolds: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl CoefficientConfig {
    pub fn leslie(&self) -> LeslieCoefficients {
        LeslieCoefficients::with_alphas(
            [
                self.alpha1,
                self.alpha2,
                self.alpha3,
                self.alpha4,
                self.alpha5,
                self.alpha6,
            ],
            self.gamma,
            self.reynolds,
        )
    }

    pub fn viscosities(&self) -> CliResult<Viscosities> {
        Viscosities::new(self.leslie()).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn elastic(&self) -> CliResult<ElasticConstants> {
        ElasticConstants::new(self.k1, self.k2, self.k3).map_err(|e| CliError::Validation(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Rk4,
    Imex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_scheme")]
    pub scheme: SchemeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mollify_cutoff: Option<f64>,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "yes")]
    pub renormalize: bool,
}

fn default_scheme() -> SchemeName {
    SchemeName::Rk4
}

fn yes() -> bool {
    true
}

impl SolverSection {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            scheme: match self.scheme {
                SchemeName::Rk4 => Scheme::Rk4,
                SchemeName::Imex => Scheme::Imex,
            },
            mollify_cutoff: self.mollify_cutoff,
            dealias: self.dealias,
            renormalize: self.renormalize,
        }
    }
}

/// Initial condition: a preset name and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub preset: String,
    /// Base director `b`.
    #[serde(default = "default_director")]
    pub director: [f64; 3],
    /// Twist angle, bump angle or Taylor-Green speed, depending on the preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Taylor-Green wavenumber in units of `2π/L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<u32>,
    /// Bump radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    /// Bump center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    /// Optional Taylor-Green flow added to a director preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowConfig>,
    /// Snapshot file for the `snapshot` preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn default_director() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub amplitude: f64,
    #[serde(default = "one")]
    pub mode: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    /// Steps between snapshots; 0 keeps only the initial and final states.
    #[serde(default)]
    pub snapshot_stride: usize,
    /// Steps between ledger rows.
    #[serde(default = "one_usize")]
    pub ledger_stride: usize,
}

fn default_directory() -> PathBuf {
    PathBuf::from("run")
}

fn one_usize() -> usize {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            snapshot_stride: 0,
            ledger_stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorConfig {
    /// Ball radius; defaults to `L/8`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Grid stride of the concentration search.
    #[serde(default = "default_monitor_stride")]
    pub stride: usize,
    /// Ball centers tracked by the local monotonicity report.
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
}

fn default_monitor_stride() -> usize {
    4
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            radius: None,
            stride: default_monitor_stride(),
            points: Vec::new(),
        }
    }
}

impl MonitorConfig {
    pub fn radius_for(&self, length: f64) -> f64 {
        self.radius.unwrap_or(length / 8.0)
    }
}

/// Outcome of the closed-form dissipation test, logged but never fatal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientVerdict {
    pub admissible_2d: bool,
    pub admissible_3d: bool,
    pub margin_2d: f64,
}

impl CoefficientVerdict {
    pub fn new(visc: &Viscosities) -> Self {
        let b = visc.derived.betas();
        Self {
            admissible_2d: admissible(b, Dim::Two),
            admissible_3d: admissible(b, Dim::Three),
            margin_2d: admissibility_margin_2d(b),
        }
    }

    pub fn describe(&self) -> String {
        if self.admissible_2d {
            "admissible (2-D)".to_string()
        } else {
            "NOT admissible (2-D): the viscous dissipation can be negative".to_string()
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every invariant that can be decided without running.
    pub fn validate(&self) -> CliResult<()> {
        let grid = self.grid()?;
        self.coefficients.viscosities()?;
        self.coefficients.elastic()?;
        if let Some(s) = &self.solver {
            s.solver_config()
                .validate()
                .map_err(|e| CliError::Validation(e.to_string()))?;
            if !s.t_end.is_finite() {
                return Err(CliError::Validation(format!(
                    "solver.t_end = {} must be finite",
                    s.t_end
                )));
            }
        }
        if let Some(init) = &self.initial {
            crate::presets::check_params(init, &grid)?;
        }
        if self.output.ledger_stride == 0 {
            return Err(CliError::Validation("output.ledger_stride must be at least 1".into()));
        }
        let l = grid.length();
        let r = self.monitors.radius_for(l);
        if !(r > 0.0 && r <= l / 2.0) {
            return Err(CliError::Validation(format!(
                "monitors.radius = {r} must lie in (0, L/2 = {}]",
                l / 2.0
            )));
        }
        if !self.monitors.points.is_empty() && r > l / 4.0 {
            return Err(CliError::Validation(format!(
                "monitors.radius = {r} exceeds L/4 = {}, which the monotonicity report needs",
                l / 4.0
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> CliResult<Grid> {
        Grid::new(self.grid.n, self.grid.length).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn model(&self) -> CliResult<Model> {
        Model::new(self.grid()?, self.coefficients.leslie(), self.coefficients.elastic()?)
            .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn solver(&self) -> CliResult<&SolverSection> {
        self.solver
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing [solver] section".into()))
    }

    pub fn initial(&self) -> CliResult<&InitialConfig> {
        self.initial
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing [initial] section".into()))
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let cfg = RunConfig::parse(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

//! JSON run configuration.
//!
//! ```json
//! {
//!   "grid": { "dim": 2, "n": 64, "box_length": 12.566, "dealias_fraction": 0.6667 },
//!   "params": { "M": 1.0, "r": -0.3,
//!               "eta": { "kind": "smooth_monotone", "lower": 0.5, "upper": 1.5, "slope_cap": 0.5 },
//!               "mobility": { "kind": "constant", "value": 1.0 } },
//!   "step": { "dt": 1e-4, "t_end": 0.1 },
//!   "initial": {
//!     "phi": { "kind": "constant_plus_noise", "mean": 0.07, "amplitude": 0.1, "seed": 1, "cutoff": 4 },
//!     "u": { "kind": "random_solenoidal", "amplitude": 0.1, "seed": 2, "cutoff": 4 }
//!   },
//!   "output": { "directory": "out", "stride": 10, "diagnostics": ["ledger", "snapshots"] }
//! }
//! ```
//!
//! Omitted keys take the documented defaults: `box_length` 1, `dealias_fraction` 2/3,
//! `M` 1, constant coefficients of value 1, `bulk` cubic, `hydrodynamics` true,
//! `stabilization_s` 2, `stabilization_kappa` 0, `u` zero, output to `out` every step
//! with the ledger only. The optional `oracle` and `audit` sections configure the
//! verification subcommands. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::noise::{band_limited_scalar, band_limited_solenoidal};
use super::snapshot::load_state;
use crate::error::{Error, Result};
use crate::integrator::StepConfig;
use crate::model::{PhysParams, State};
use crate::spectral::{Grid, GridSpec, ScalarField, VectorField};

/// Initial phase field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiInit {
    ConstantPlusNoise {
        mean: f64,
        amplitude: f64,
        seed: u64,
        cutoff: usize,
    },
    /// `mean + amplitude * cos(2 pi k.x / L)`.
    SingleMode {
        k: Vec<i64>,
        amplitude: f64,
        #[serde(default)]
        mean: f64,
    },
    Snapshot {
        path: PathBuf,
    },
}

/// Initial velocity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocityInit {
    #[default]
    Zero,
    RandomSolenoidal {
        amplitude: f64,
        seed: u64,
        cutoff: usize,
    },
    Snapshot {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub phi: PhiInit,
    #[serde(default)]
    pub u: VelocityInit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    /// Ledger and norm CSV.
    Ledger,
    /// A snapshot at every sampled step.
    Snapshots,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_stride() -> usize {
    1
}

fn default_diagnostics() -> Vec<Diagnostic> {
    vec![Diagnostic::Ledger]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_diagnostics")]
    pub diagnostics: Vec<Diagnostic>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: default_directory(),
            stride: default_stride(),
            diagnostics: default_diagnostics(),
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, d: Diagnostic) -> bool {
        self.diagnostics.contains(&d)
    }
}

fn default_modes() -> usize {
    4
}

fn default_oracle_dt() -> f64 {
    1e-6
}

/// Settings of the Galerkin reference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    #[serde(default = "default_oracle_dt")]
    pub dt: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_modes: default_modes(),
            dt: default_oracle_dt(),
        }
    }
}

fn default_epsilons() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4]
}

fn default_pairs() -> usize {
    10
}

fn default_audit_seed() -> u64 {
    1
}

fn default_noise_cutoff() -> usize {
    2
}

/// Settings of the audit subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    /// Steps of the energy-audit sweep; empty means `dt, dt/2, dt/4` from `step`.
    #[serde(default)]
    pub dt_sweep: Vec<f64>,
    /// Perturbation sizes of the gradient check, largest first.
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    /// Random `(phi, v)` pairs in the gradient check.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Seed of the random gradient-check fields and of the continuous-dependence perturbation.
    #[serde(default = "default_audit_seed")]
    pub seed: u64,
    /// Spectral cutoff of those random fields.
    #[serde(default = "default_noise_cutoff")]
    pub noise_cutoff: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            dt_sweep: Vec::new(),
            epsilons: default_epsilons(),
            pairs: default_pairs(),
            seed: default_audit_seed(),
            noise_cutoff: default_noise_cutoff(),
        }
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub params: PhysParams,
    pub step: StepConfig,
    pub initial: InitialCondition,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub audit: AuditConfig,
}

fn cutoff_ok(field: &str, cutoff: usize, n: usize) -> Result<()> {
    if cutoff == 0 || cutoff >= n / 2 {
        return Err(Error::Config(format!(
            "{field} must lie in [1, {}] for n = {n}, got {cutoff}",
            n / 2 - 1
        )));
    }
    Ok(())
}

fn finite(field: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::Config(format!("{field} must be finite, got {v}")));
    }
    Ok(())
}

impl RunConfig {
    /// Semantic checks, including (A1) on both coefficient families.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.params.validate()?;
        self.step.validate()?;
        let n = self.grid.n;
        match &self.initial.phi {
            PhiInit::ConstantPlusNoise {
                mean,
                amplitude,
                cutoff,
                ..
            } => {
                finite("initial.phi.mean", *mean)?;
                finite("initial.phi.amplitude", *amplitude)?;
                cutoff_ok("initial.phi.cutoff", *cutoff, n)?;
            }
            PhiInit::SingleMode { k, amplitude, mean } => {
                finite("initial.phi.amplitude", *amplitude)?;
                finite("initial.phi.mean", *mean)?;
                if k.len() != self.grid.dim {
                    return Err(Error::Config(format!(
                        "initial.phi.k must have {} entries, got {}",
                        self.grid.dim,
                        k.len()
                    )));
                }
                let lim = (n / 2) as i64;
                if k.iter().any(|&x| x <= -lim || x >= lim) {
                    return Err(Error::Config(format!(
                        "initial.phi.k entries must lie in ({}, {lim}), got {k:?}",
                        -lim
                    )));
                }
            }
            PhiInit::Snapshot { .. } => {}
        }
        if let VelocityInit::RandomSolenoidal {
            amplitude, cutoff, ..
        } = &self.initial.u
        {
            finite("initial.u.amplitude", *amplitude)?;
            cutoff_ok("initial.u.cutoff", *cutoff, n)?;
        }
        if self.output.stride == 0 {
            return Err(Error::Config("output.stride must be >= 1, got 0".into()));
        }
        if self.oracle.n_modes == 0 || self.oracle.n_modes > crate::galerkin::MAX_MODES {
            return Err(Error::Config(format!(
                "oracle.n_modes must lie in [1, {}], got {}",
                crate::galerkin::MAX_MODES,
                self.oracle.n_modes
            )));
        }
        if !(self.oracle.dt > 0.0 && self.oracle.dt <= 1e-5) {
            return Err(Error::Config(format!(
                "oracle.dt must lie in (0, 1e-5], got {}",
                self.oracle.dt
            )));
        }
        if self.audit.dt_sweep.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::Config(format!(
                "audit.dt_sweep entries must be > 0, got {:?}",
                self.audit.dt_sweep
            )));
        }
        if self.audit.epsilons.len() < 2 || self.audit.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::Config(format!(
                "audit.epsilons needs at least two positive entries, got {:?}",
                self.audit.epsilons
            )));
        }
        cutoff_ok("audit.noise_cutoff", self.audit.noise_cutoff, n)?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Steps of the energy-audit sweep.
    pub fn dt_sweep(&self) -> Vec<f64> {
        if self.audit.dt_sweep.is_empty() {
            let dt = self.step.dt;
            vec![dt, dt / 2.0, dt / 4.0]
        } else {
            self.audit.dt_sweep.clone()
        }
    }

    /// Builds the grid and the initial state. Snapshot paths are resolved against `base_dir`.
    pub fn initial_state(&self, base_dir: &Path) -> Result<State> {
        let grid = Grid::new(self.grid)?;
        let phi = match &self.initial.phi {
            PhiInit::ConstantPlusNoise {
                mean,
                amplitude,
                seed,
                cutoff,
            } => band_limited_scalar(&grid, *mean, *amplitude, *seed, *cutoff)?,
            PhiInit::SingleMode { k, amplitude, mean } => single_mode(&grid, k, *amplitude, *mean),
            PhiInit::Snapshot { path } => load_state(&base_dir.join(path), &grid)?.phi,
        };
        let u = match &self.initial.u {
            VelocityInit::Zero => VectorField::zeros(&grid),
            VelocityInit::RandomSolenoidal {
                amplitude,
                seed,
                cutoff,
            } => band_limited_solenoidal(&grid, *amplitude, *seed, *cutoff)?,
            VelocityInit::Snapshot { path } => {
                let s = load_state(&base_dir.join(path), &grid)?;
                s.check_invariants(1e-8, 1e-10)?;
                s.u
            }
        };
        State::new(u, phi, 0.0)
    }
}

fn single_mode(grid: &Arc<Grid>, k: &[i64], amplitude: f64, mean: f64) -> ScalarField {
    let mut coeffs = vec![crate::spectral::Complex64::default(); grid.len()];
    coeffs[0].re = mean * grid.len() as f64;
    if k.iter().any(|&x| x != 0) {
        super::noise::add_mode(grid, &mut coeffs, k, amplitude, 0.0);
    } else {
        coeffs[0].re += amplitude * grid.len() as f64;
    }
    ScalarField::from_coeffs(grid, coeffs)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

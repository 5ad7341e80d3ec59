//! Drivers behind the command-line subcommands, shared with the acceptance suite.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::{cont_dep_experiment, ContDepReport, LedgerRow};
use crate::error::{Error, Result};
use crate::galerkin::GalerkinSystem;
use crate::integrator::{run, stability_probe, step_imex, Observer, StepConfig};
use crate::io::config::{Diagnostic, RunConfig};
use crate::io::noise::{band_limited_scalar, band_limited_solenoidal};
use crate::io::{write_snapshot, LedgerWriter, SnapshotSeries};
use crate::model::{chemical_potential, sh_energy, State};
use crate::spectral::VectorField;

/// Files produced by [`simulate`].
#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub steps: usize,
    pub rows: usize,
    pub ledger_csv: Option<PathBuf>,
    pub snapshots: Vec<PathBuf>,
    pub final_snapshot: PathBuf,
    pub last_row: Option<LedgerRow>,
}

/// Runs the configured trajectory, writing `config.json`, `ledger.csv`, sampled
/// snapshots and `final.bin` into `out_dir`.
pub fn simulate(cfg: &RunConfig, base_dir: &Path, out_dir: &Path) -> Result<SimulateSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let cfg_path = out_dir.join("config.json");
    std::fs::write(&cfg_path, cfg.to_json()).map_err(|e| Error::io(&cfg_path, e))?;
    let initial = cfg.initial_state(base_dir)?;

    let csv_path = out_dir.join("ledger.csv");
    let mut csv = if cfg.output.wants(Diagnostic::Ledger) {
        Some(LedgerWriter::create(&csv_path)?)
    } else {
        None
    };
    let mut snaps = cfg.output.wants(Diagnostic::Snapshots).then(|| SnapshotSeries::new(out_dir));
    let mut observers: Vec<&mut dyn Observer> = Vec::new();
    if let Some(c) = csv.as_mut() {
        observers.push(c);
    }
    if let Some(s) = snaps.as_mut() {
        observers.push(s);
    }
    let rec = run(initial, &cfg.params, &cfg.step, cfg.output.stride, &mut observers)?;
    let final_snapshot = out_dir.join("final.bin");
    write_snapshot(&rec.final_state, &final_snapshot)?;
    Ok(SimulateSummary {
        steps: rec.steps,
        rows: rec.ledger.len(),
        ledger_csv: csv.is_some().then_some(csv_path),
        snapshots: snaps.map(|s| s.written).unwrap_or_default(),
        final_snapshot,
        last_row: rec.ledger.last().copied(),
    })
}

/// One random `(phi, v)` pair of the gradient check.
#[derive(Debug, Clone, Serialize)]
pub struct GradPair {
    pub seed: u64,
    /// `|FD - <psi, v>| / |<psi, v>|` per epsilon.
    pub rel_errors: Vec<f64>,
    /// Least-squares slope of `log err` against `log eps`.
    pub order: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradCheckReport {
    pub epsilons: Vec<f64>,
    pub pairs: Vec<GradPair>,
}

impl GradCheckReport {
    /// Largest relative error at the smallest epsilon.
    pub fn max_final_error(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| *p.rel_errors.last().expect("at least two epsilons"))
            .fold(0.0, f64::max)
    }

    pub fn min_order(&self) -> f64 {
        self.pairs.iter().map(|p| p.order).fold(f64::INFINITY, f64::min)
    }
}

/// Least-squares slope of `log y` on `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Central-difference test of `psi = dF_sh/dphi` along random band-limited directions.
///
/// Pair `i` uses `phi = <phi_0> + 0.5 * noise(seed + 2i)` and `v = 0.2 * noise(seed + 2i + 1)`
/// with the audit cutoff, where `<phi_0>` is the mean of the configured initial field.
pub fn grad_check(cfg: &RunConfig, base_dir: &Path) -> Result<GradCheckReport> {
    let init = cfg.initial_state(base_dir)?;
    let grid = init.grid();
    let mean = init.phi.mean();
    let a = &cfg.audit;
    let p = &cfg.params;
    let mut pairs = Vec::with_capacity(a.pairs);
    for i in 0..a.pairs as u64 {
        let seed = a.seed.wrapping_add(2 * i);
        let phi = band_limited_scalar(grid, mean, 0.5, seed, a.noise_cutoff)?;
        let v = band_limited_scalar(grid, 0.0, 0.2, seed.wrapping_add(1), a.noise_cutoff)?;
        let exact = chemical_potential(&phi, p).inner(&v);
        let rel_errors: Vec<f64> = a
            .epsilons
            .iter()
            .map(|&eps| {
                let fd = (sh_energy(&phi.axpy(eps, &v), p) - sh_energy(&phi.axpy(-eps, &v), p)) / (2.0 * eps);
                (fd - exact).abs() / exact.abs()
            })
            .collect();
        let order = loglog_slope(&a.epsilons, &rel_errors);
        pairs.push(GradPair {
            seed,
            rel_errors,
            order,
        });
    }
    Ok(GradCheckReport {
        epsilons: a.epsilons.clone(),
        pairs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyAuditRow {
    pub dt: f64,
    pub steps: usize,
    /// Ledger residual at the final time.
    pub residual: f64,
    /// `|residual| / |E_0|`.
    pub rel_residual: f64,
    /// Largest `residual / |E_0|` over all samples (positive means energy was created).
    pub max_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyAuditReport {
    /// Initial kinetic plus Swift-Hohenberg energy.
    pub e0: f64,
    pub rows: Vec<EnergyAuditRow>,
    /// Observed order between consecutive sweep entries.
    pub orders: Vec<f64>,
}

impl EnergyAuditReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Integrates to `t_end` at every step of the sweep and tabulates the ledger residual.
pub fn energy_audit(cfg: &RunConfig, base_dir: &Path) -> Result<EnergyAuditReport> {
    let init = cfg.initial_state(base_dir)?;
    let mut rows = Vec::new();
    let mut e0 = f64::NAN;
    for dt in cfg.dt_sweep() {
        let step = StepConfig { dt, ..cfg.step };
        let rec = run(init.clone(), &cfg.params, &step, 1, &mut [])?;
        let (Some(first), Some(last)) = (rec.ledger.first(), rec.ledger.last()) else {
            return Err(Error::Config("energy audit needs t_end > 0".into()));
        };
        e0 = first.total();
        let scale = e0.abs();
        let max_excess = rec.ledger.iter().map(|r| r.residual / scale).fold(f64::NEG_INFINITY, f64::max);
        rows.push(EnergyAuditRow {
            dt,
            steps: rec.steps,
            residual: last.residual,
            rel_residual: last.residual.abs() / scale,
            max_excess,
        });
    }
    let orders = rows
        .windows(2)
        .map(|w| (w[0].rel_residual / w[1].rel_residual).ln() / (w[0].dt / w[1].dt).ln())
        .collect();
    Ok(EnergyAuditReport { e0, rows, orders })
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub n_modes: usize,
    pub solver_dt: f64,
    pub oracle_dt: f64,
    pub t_end: f64,
    /// `||phi_solver - phi_oracle||` at `t_end`.
    pub gap_phi: f64,
    pub gap_u: f64,
    pub phi_norm: f64,
    pub u_norm: f64,
    pub solver_residual: f64,
    pub oracle_residual: f64,
}

/// Final states of both runs, for diffing or export.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub report: OracleReport,
    pub solver: State,
    pub oracle: State,
}

/// Runs the solver and the Galerkin system from the same projected data and compares
/// the final fields. The solver's dealias cutoff must equal `oracle.n_modes`.
pub fn oracle_compare(cfg: &RunConfig, base_dir: &Path) -> Result<OracleComparison> {
    let k = cfg.oracle.n_modes;
    if cfg.grid.dealias_cutoff() != k {
        return Err(Error::Config(format!(
            "oracle comparison needs the solver truncation to equal oracle.n_modes = {k}, \
             but grid keeps |j| <= {}",
            cfg.grid.dealias_cutoff()
        )));
    }
    let raw = cfg.initial_state(base_dir)?;
    let grid = raw.grid().clone();
    let sys = GalerkinSystem::assemble(k, cfg.params, &cfg.grid)?;
    // both runs start from the retained span
    let y0 = sys.project_initial(&raw)?;
    let start = sys.to_state(&y0, &grid, 0.0)?;

    let rec = run(start, &cfg.params, &cfg.step, usize::MAX, &mut [])?;
    let t_end = cfg.step.t_end;
    let sample = (t_end / cfg.oracle.dt).ceil().max(1.0) as usize;
    let traj = sys.integrate_rk4(&y0, cfg.oracle.dt, t_end, sample)?;
    let y_end = traj.coeffs.last().expect("trajectory has samples");
    let oracle = sys.to_state(y_end, &grid, rec.final_state.t)?;
    let solver = rec.final_state;
    let oracle_ledger = sys.ledger(&traj, cfg.oracle.dt);
    let report = OracleReport {
        n_modes: k,
        solver_dt: cfg.step.dt,
        oracle_dt: cfg.oracle.dt,
        t_end,
        gap_phi: solver.phi.axpy(-1.0, &oracle.phi).l2_norm(),
        gap_u: solver.u.axpy(-1.0, &oracle.u).l2_norm(),
        phi_norm: oracle.phi.l2_norm(),
        u_norm: oracle.u.l2_norm(),
        solver_residual: rec.ledger.last().map_or(0.0, |r| r.residual),
        oracle_residual: oracle_ledger.last().map_or(0.0, |r| r.residual),
    };
    Ok(OracleComparison {
        report,
        solver,
        oracle,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub steps: usize,
    pub mass0: f64,
    /// Largest `|<phi(t)> - <phi_0>|` over all steps.
    pub max_mass_drift: f64,
    /// Largest spectral `max |div u|` over all steps.
    pub max_divergence: f64,
    /// Largest `|<u_i>|` over all steps.
    pub max_velocity_mean: f64,
}

/// Steps the configured run and records conservation errors after every step.
pub fn mass_audit(cfg: &RunConfig, base_dir: &Path) -> Result<MassReport> {
    let mut state = cfg.initial_state(base_dir)?;
    cfg.step.validate()?;
    let steps = cfg.step.step_count(state.t);
    let mass0 = state.phi.mean();
    let mut rep = MassReport {
        steps,
        mass0,
        max_mass_drift: 0.0,
        max_divergence: state.max_divergence(),
        max_velocity_mean: state.max_velocity_mean(),
    };
    for _ in 0..steps {
        state = step_imex(&state, &cfg.params, &cfg.step)?;
        rep.max_mass_drift = rep.max_mass_drift.max((state.phi.mean() - mass0).abs());
        rep.max_divergence = rep.max_divergence.max(state.max_divergence());
        rep.max_velocity_mean = rep.max_velocity_mean.max(state.max_velocity_mean());
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct GradFlowReport {
    pub dt: f64,
    pub steps: usize,
    pub sh_initial: f64,
    pub sh_final: f64,
    /// Largest single-step increase `F_sh(n+1) - F_sh(n)`; negative when every step descends.
    pub max_increase: f64,
}

/// Runs the phase field without flow for `steps` steps at the step size suggested by
/// [`stability_probe`] on the initial state, tracking the Swift-Hohenberg energy.
pub fn gradient_flow(cfg: &RunConfig, base_dir: &Path, steps: usize) -> Result<GradFlowReport> {
    let params = cfg.params.without_flow();
    let mut state = cfg.initial_state(base_dir)?;
    state.u = VectorField::zeros(state.grid());
    let dt = stability_probe(&params, &state, &cfg.step).suggested;
    let step = StepConfig {
        dt,
        max_steps: Some(steps),
        t_end: state.t + dt * steps as f64,
        ..cfg.step
    };
    let sh_initial = sh_energy(&state.phi, &params);
    let mut prev = sh_initial;
    let mut max_increase = f64::NEG_INFINITY;
    for _ in 0..steps {
        state = step_imex(&state, &params, &step)?;
        let e = sh_energy(&state.phi, &params);
        max_increase = max_increase.max(e - prev);
        prev = e;
    }
    Ok(GradFlowReport {
        dt,
        steps,
        sh_initial,
        sh_final: prev,
        max_increase,
    })
}

/// Continuous-dependence runs at `delta` and `2 delta`.
#[derive(Debug, Clone, Serialize)]
pub struct ContDepPair {
    pub single: ContDepReport,
    pub double: ContDepReport,
}

impl ContDepPair {
    /// Output-gap growth from `delta` to `2 delta`; 4 in the linear regime.
    pub fn scaling(&self) -> Option<f64> {
        (self.single.output_gap > 0.0).then(|| self.double.output_gap / self.single.output_gap)
    }
}

/// Perturbs the configured initial data by `delta` times a seeded band-limited pair
/// `(du, dphi)` of unit amplitude, and repeats with `2 delta`.
pub fn cont_dep(cfg: &RunConfig, base_dir: &Path, delta: f64) -> Result<ContDepPair> {
    let base = cfg.initial_state(base_dir)?;
    let grid = base.grid();
    let a = &cfg.audit;
    let du = band_limited_solenoidal(grid, 1.0, a.seed, a.noise_cutoff)?;
    let dphi = band_limited_scalar(grid, 0.0, 1.0, a.seed.wrapping_add(1), a.noise_cutoff)?;
    let single = cont_dep_experiment(&base, &cfg.params, &cfg.step, &du, &dphi, delta)?;
    let double = cont_dep_experiment(&base, &cfg.params, &cfg.step, &du, &dphi, 2.0 * delta)?;
    Ok(ContDepPair { single, double })
}

//! `nspfc`: run, audit and validate simulations from JSON configurations.
//!
//! Exit codes: 0 success, 1 invalid input, 2 blow-up during a run, 3 a check failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nspfc_core::experiments::{self, EnergyAuditReport};
use nspfc_core::io::{load_config, write_snapshot, RunConfig};
use nspfc_core::model::validate_a1;
use nspfc_core::Error;

#[derive(Parser)]
#[command(name = "nspfc", version, about = "Navier-Stokes phase-field crystal simulator")]
struct Cli {
    /// Print the report as JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the configured trajectory and write ledger CSV and snapshots.
    Simulate {
        config: PathBuf,
        /// Output directory; overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference check of the chemical potential.
    GradCheck {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        max_error: f64,
        #[arg(long, default_value_t = 1.9)]
        min_order: f64,
    },
    /// Energy-ledger residual across a sweep of time steps.
    EnergyAudit {
        config: PathBuf,
        /// Smallest acceptable observed order (2D).
        #[arg(long, default_value_t = 0.9)]
        min_order: f64,
        /// Largest acceptable relative residual at the finest step (2D).
        #[arg(long, default_value_t = 1e-4)]
        max_residual: f64,
        /// Largest acceptable relative energy excess at any sample (3D).
        #[arg(long, default_value_t = 1e-6)]
        max_excess: f64,
    },
    /// Compare the solver against the Galerkin reference system.
    OracleCompare {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write `solver.bin` and `oracle.bin` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continuous dependence on initial data at `delta` and `2 delta`.
    ContDep {
        config: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Allowed relative deviation of the output-gap scaling from 4.
        #[arg(long, default_value_t = 0.1)]
        scaling_tol: f64,
    },
    /// Conservation of mass, divergence and velocity mean at every step.
    MassAudit {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        mass_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        div_tol: f64,
        #[arg(long, default_value_t = 1e-13)]
        mean_tol: f64,
    },
    /// Parse the configuration and check the coefficient families.
    Validate { config: PathBuf },
}

enum Failure {
    Input(Error),
    BlowUp(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BlowUp { .. } => Failure::BlowUp(e),
            other => Failure::Input(other),
        }
    }
}

type Outcome = Result<(), Failure>;

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn load(config: &Path) -> Result<(RunConfig, PathBuf), Failure> {
    Ok((load_config(config)?, base_dir(config)))
}

fn emit_json(json: bool, value: &impl serde::Serialize) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(what()))
    }
}

fn print_energy(rep: &EnergyAuditReport) {
    println!("e0 = {:.12e}", rep.e0);
    println!("{:>12} {:>8} {:>20} {:>14} {:>14}", "dt", "steps", "residual", "rel", "max_excess");
    for r in &rep.rows {
        println!(
            "{:>12e} {:>8} {:>20.12e} {:>14.6e} {:>14.6e}",
            r.dt, r.steps, r.residual, r.rel_residual, r.max_excess
        );
    }
    for (i, o) in rep.orders.iter().enumerate() {
        println!("order[{i}] = {o:.4}");
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let json = cli.json;
    match &cli.cmd {
        Cmd::Validate { config } => {
            let (cfg, _) = load(config)?;
            let eta = validate_a1(&cfg.params.eta, 1000)?;
            let mob = validate_a1(&cfg.params.mobility, 1000)?;
            if !json {
                println!("{}: valid", config.display());
                println!("eta in [{:.6}, {:.6}], mobility in [{:.6}, {:.6}]", eta.min_value, eta.max_value, mob.min_value, mob.max_value);
            }
            emit_json(json, &cfg);
            Ok(())
        }
        Cmd::Simulate { config, out } => {
            let (cfg, base) = load(config)?;
            let dir = out.clone().unwrap_or_else(|| cfg.output.directory.clone());
            let s = experiments::simulate(&cfg, &base, &dir)?;
            if !json {
                println!("{} steps, {} ledger rows, final state in {}", s.steps, s.rows, s.final_snapshot.display());
                if let Some(r) = s.last_row {
                    println!("t = {}, residual = {:.6e}, mass = {:.15}", r.t, r.residual, r.mass);
                }
            }
            emit_json(json, &s);
            Ok(())
        }
        Cmd::GradCheck {
            config,
            max_error,
            min_order,
        } => {
            let (cfg, base) = load(config)?;
            let r = experiments::grad_check(&cfg, &base)?;
            if !json {
                for p in &r.pairs {
                    let errs: Vec<String> = p.rel_errors.iter().map(|e| format!("{e:.3e}")).collect();
                    println!("seed {:>4}: errors [{}] order {:.4}", p.seed, errs.join(", "), p.order);
                }
                println!("max error {:.3e}, min order {:.4}", r.max_final_error(), r.min_order());
            }
            emit_json(json, &r);
            check(r.max_final_error() <= *max_error && r.min_order() >= *min_order, || {
                format!(
                    "gradient check: error {:.3e} (limit {max_error:e}), order {:.4} (limit {min_order})",
                    r.max_final_error(),
                    r.min_order()
                )
            })
        }
        Cmd::EnergyAudit {
            config,
            min_order,
            max_residual,
            max_excess,
        } => {
            let (cfg, base) = load(config)?;
            let r = experiments::energy_audit(&cfg, &base)?;
            if !json {
                print_energy(&r);
            }
            emit_json(json, &r);
            if cfg.grid.dim == 2 {
                let last = r.rows.last().map_or(f64::INFINITY, |x| x.rel_residual);
                check(r.min_order() >= *min_order && last <= *max_residual, || {
                    format!(
                        "energy audit: order {:.4} (limit {min_order}), residual {last:.3e} (limit {max_residual:e})",
                        r.min_order()
                    )
                })
            } else {
                let worst = r.rows.iter().map(|x| x.max_excess).fold(f64::NEG_INFINITY, f64::max);
                check(worst <= *max_excess, || {
                    format!("energy audit: energy excess {worst:.3e} (limit {max_excess:e})")
                })
            }
        }
        Cmd::OracleCompare { config, tol, out } => {
            let (cfg, base) = load(config)?;
            let c = experiments::oracle_compare(&cfg, &base)?;
            let r = &c.report;
            if let Some(dir) = out {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Input(Error::Io {
                    path: dir.clone(),
                    source: e,
                }))?;
                write_snapshot(&c.solver, &dir.join("solver.bin"))?;
                write_snapshot(&c.oracle, &dir.join("oracle.bin"))?;
            }
            if !json {
                println!("modes {}, solver dt {:e}, oracle dt {:e}, T = {}", r.n_modes, r.solver_dt, r.oracle_dt, r.t_end);
                println!("L2 gap phi {:.6e} (|phi| {:.6e})", r.gap_phi, r.phi_norm);
                println!("L2 gap u   {:.6e} (|u| {:.6e})", r.gap_u, r.u_norm);
                println!("ledger residual solver {:.3e}, oracle {:.3e}", r.solver_residual, r.oracle_residual);
            }
            emit_json(json, r);
            check(r.gap_phi <= *tol && r.gap_u <= *tol, || {
                format!("oracle gap phi {:.3e}, u {:.3e} exceeds {tol:e}", r.gap_phi, r.gap_u)
            })
        }
        Cmd::ContDep {
            config,
            delta,
            scaling_tol,
        } => {
            let (cfg, base) = load(config)?;
            let r = experiments::cont_dep(&cfg, &base, *delta)?;
            let scaling = r.scaling();
            if !json {
                for (label, x) in [("delta", &r.single), ("2 delta", &r.double)] {
                    let ratio = x.ratio.map_or("degenerate (0/0)".to_string(), |v| format!("{v:.6e}"));
                    println!("{label:>8}: input {:.6e}, output {:.6e}, ratio {ratio}", x.input_gap, x.output_gap);
                }
                match scaling {
                    Some(s) => println!("output scaling {s:.6}"),
                    None => println!("output scaling undefined (zero gap)"),
                }
            }
            emit_json(json, &r);
            if *delta == 0.0 {
                return Ok(());
            }
            let ok = r.single.ratio.is_some_and(f64::is_finite)
                && scaling.is_some_and(|s| (s / 4.0 - 1.0).abs() <= *scaling_tol);
            check(ok, || format!("continuous dependence: scaling {scaling:?}, expected 4 within {scaling_tol}"))
        }
        Cmd::MassAudit {
            config,
            mass_tol,
            div_tol,
            mean_tol,
        } => {
            let (cfg, base) = load(config)?;
            let r = experiments::mass_audit(&cfg, &base)?;
            if !json {
                println!("{} steps, <phi_0> = {:.15}", r.steps, r.mass0);
                println!("max mass drift {:.3e}", r.max_mass_drift);
                println!("max |div u| {:.3e}", r.max_divergence);
                println!("max |<u>| {:.3e}", r.max_velocity_mean);
            }
            emit_json(json, &r);
            check(
                r.max_mass_drift <= *mass_tol && r.max_divergence <= *div_tol && r.max_velocity_mean <= *mean_tol,
                || "mass audit: conservation tolerance exceeded".to_string(),
            )
        }
    }
}

fn main() -> ExitCode {
    // usage errors map to 1; clap would otherwise use 2, the blow-up code
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::BlowUp(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(3)
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Runs without the libtest harness so the criteria execute sequentially and their
//! wall-clock limits are measured on an otherwise idle process.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nspfc_core::experiments::{
    cont_dep, energy_audit, grad_check, gradient_flow, mass_audit, oracle_compare, simulate,
};
use nspfc_core::io::config::RunConfig;
use nspfc_core::io::noise::band_limited_solenoidal;
use nspfc_core::io::{load_config, Snapshot};
use nspfc_core::model::trilinear_b0;
use nspfc_core::spectral::{grad_norm_sq, strain_norm_sq, velocity_gradient, Grid, GridSpec, VectorField};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> (RunConfig, PathBuf) {
    let dir = configs_dir();
    let cfg = load_config(&dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    (cfg, dir)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn mass_and_divergence() -> (Outcome, Outcome) {
    let (cfg, base) = config("accept_mass_2d.json");
    let t0 = Instant::now();
    let r = mass_audit(&cfg, &base).expect("mass audit runs");
    let el = t0.elapsed();
    let mass_ok = (r.mass0 - 0.07).abs() <= 1e-12 && r.max_mass_drift <= 1e-12 && within(el, 60);
    let c1 = outcome(
        mass_ok && r.steps == 1000,
        format!(
            "{} steps, <phi_0> = {:.15}, max drift {:.3e} (limit 1e-12), {:.1}s (limit 60s)",
            r.steps,
            r.mass0,
            r.max_mass_drift,
            el.as_secs_f64()
        ),
    );
    let c2 = outcome(
        r.max_divergence <= 1e-12 && r.max_velocity_mean <= 1e-13,
        format!(
            "max |div u| {:.3e} (limit 1e-12), max |<u>| {:.3e} (limit 1e-13)",
            r.max_divergence, r.max_velocity_mean
        ),
    );
    (c1, c2)
}

fn variational_derivative() -> Outcome {
    let (cfg, base) = config("accept_gradcheck.json");
    let r = grad_check(&cfg, &base).expect("gradient check runs");
    let eps_ok = cfg.audit.epsilons.last() == Some(&1e-4);
    outcome(
        eps_ok && r.pairs.len() == 10 && r.max_final_error() <= 1e-8 && r.min_order() >= 1.9,
        format!(
            "{} pairs, max error at eps 1e-4 {:.3e} (limit 1e-8), min order {:.4} (limit 1.9)",
            r.pairs.len(),
            r.max_final_error(),
            r.min_order()
        ),
    )
}

fn energy_identity_2d() -> Outcome {
    let (cfg, base) = config("accept_energy_2d.json");
    let t0 = Instant::now();
    let r = energy_audit(&cfg, &base).expect("energy audit runs");
    let el = t0.elapsed();
    let sweep: Vec<f64> = r.rows.iter().map(|x| x.dt).collect();
    let last = r.rows.last().map_or(f64::INFINITY, |x| x.rel_residual);
    let orders: Vec<String> = r.orders.iter().map(|o| format!("{o:.4}")).collect();
    outcome(
        sweep == [4e-4, 2e-4, 1e-4]
            && cfg.step.t_end == 0.1
            && r.min_order() >= 0.9
            && last <= 1e-4
            && within(el, 300),
        format!(
            "orders [{}] (limit 0.9), residual at dt 1e-4 {:.3e} of E_0 (limit 1e-4), {:.1}s (limit 300s)",
            orders.join(", "),
            last,
            el.as_secs_f64()
        ),
    )
}

fn energy_inequality_3d() -> Outcome {
    let (cfg, base) = config("accept_energy_3d.json");
    let t0 = Instant::now();
    let r = energy_audit(&cfg, &base).expect("energy audit runs");
    let el = t0.elapsed();
    let worst = r.rows.iter().map(|x| x.max_excess).fold(f64::NEG_INFINITY, f64::max);
    let setup = cfg.grid.dim == 3 && cfg.grid.n == 32 && cfg.step.t_end == 0.05 && r.rows.iter().all(|x| x.dt == 2e-4);
    outcome(
        setup && worst <= 1e-6 && within(el, 600),
        format!(
            "32^3, dt 2e-4, T 0.05: max excess {:.3e} of E_0 (limit 1e-6), {:.1}s (limit 600s)",
            worst,
            el.as_secs_f64()
        ),
    )
}

fn gradient_flow_monotone() -> Outcome {
    let (cfg, base) = config("accept_gradflow.json");
    let r = gradient_flow(&cfg, &base, 1000).expect("gradient flow runs");
    outcome(
        !cfg.params.hydrodynamics
            && cfg.params.mobility.is_constant()
            && r.max_increase <= 1e-10
            && r.sh_final < r.sh_initial,
        format!(
            "{} steps at dt {:.4e}: max step increase {:.3e} (limit 1e-10), F_sh {:.10e} -> {:.10e}",
            r.steps, r.dt, r.max_increase, r.sh_initial, r.sh_final
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let (cfg, base) = config("accept_oracle_2d.json");
    let t0 = Instant::now();
    let c = oracle_compare(&cfg, &base).expect("oracle comparison runs");
    let el = t0.elapsed();
    let r = &c.report;
    let setup = r.n_modes == 4 && cfg.grid.dim == 2 && r.t_end == 0.1 && r.solver_dt == 1e-5 && r.oracle_dt == 1e-6;
    outcome(
        setup && r.gap_phi <= 1e-6 && r.gap_u <= 1e-6 && within(el, 120),
        format!(
            "gap phi {:.3e}, gap u {:.3e} (limit 1e-6), {:.1}s (limit 120s)",
            r.gap_phi,
            r.gap_u,
            el.as_secs_f64()
        ),
    )
}

fn continuous_dependence() -> Outcome {
    let (cfg, base) = config("accept_contdep_2d.json");
    let coarse = cont_dep(&cfg, &base, 1e-6).expect("continuous dependence runs");
    let mut fine_cfg = cfg.clone();
    fine_cfg.grid.n = 2 * cfg.grid.n;
    let fine = cont_dep(&fine_cfg, &base, 1e-6).expect("refined continuous dependence runs");
    let scaling = coarse.scaling().unwrap_or(f64::NAN);
    let (rc, rf) = (
        coarse.single.ratio.unwrap_or(f64::NAN),
        fine.single.ratio.unwrap_or(f64::NAN),
    );
    let drift = (rf / rc - 1.0).abs();
    outcome(
        (scaling / 4.0 - 1.0).abs() <= 0.1 && rc.is_finite() && rf.is_finite() && drift < 0.05,
        format!(
            "gap scaling {scaling:.6} (4 within 10%), ratio n={} {rc:.6e}, n={} {rf:.6e}, change {:.3e} (limit 5%)",
            cfg.grid.n, fine_cfg.grid.n, drift
        ),
    )
}

fn trilinear_identities() -> Outcome {
    let mut worst_zero: f64 = 0.0;
    let mut worst_skew: f64 = 0.0;
    let mut count = 0;
    for (dim, n) in [(2, 32), (3, 16)] {
        let g = Grid::new(GridSpec::new(dim, n, 2.0 * std::f64::consts::PI)).unwrap();
        for i in 0..50u64 {
            let u = band_limited_solenoidal(&g, 1.0, 3 * i + 1000, 4).unwrap();
            let v = band_limited_solenoidal(&g, 1.0, 3 * i + 1001, 4).unwrap();
            let w = band_limited_solenoidal(&g, 1.0, 3 * i + 1002, 4).unwrap();
            let scale_vv = u.l2_norm() * grad_norm_sq(&v).sqrt() * v.l2_norm();
            let scale_vw = u.l2_norm() * grad_norm_sq(&v).sqrt().max(grad_norm_sq(&w).sqrt()) * v.l2_norm().max(w.l2_norm());
            let zero = trilinear_b0(&u, &v, &v).unwrap().abs() / scale_vv;
            let skew = (trilinear_b0(&u, &v, &w).unwrap() + trilinear_b0(&u, &w, &v).unwrap()).abs() / scale_vw;
            worst_zero = worst_zero.max(zero);
            worst_skew = worst_skew.max(skew);
            count += 1;
        }
    }
    outcome(
        worst_zero <= 1e-12 && worst_skew <= 1e-12,
        format!(
            "{count} triples: max |b0(u,v,v)| {worst_zero:.3e}, max |b0(u,v,w)+b0(u,w,v)| {worst_skew:.3e} relative (limit 1e-12)"
        ),
    )
}

/// `(||grad w||^2, ||D w||^2)` by grid quadrature of the differentiated fields.
fn korn_quadrature(w: &VectorField) -> (f64, f64) {
    let grad = velocity_gradient(w);
    let dim = w.dim();
    let cell = w.grid().volume() / w.grid().len() as f64;
    let (mut full, mut sym) = (0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            let (a, b) = (grad[i][j].values(), grad[j][i].values());
            full += a.iter().map(|x| x * x).sum::<f64>() * cell;
            sym += a.iter().zip(b).map(|(x, y)| (0.5 * (x + y)).powi(2)).sum::<f64>() * cell;
        }
    }
    (full, sym)
}

fn korn_equality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_spectral: f64 = 0.0;
    let mut count = 0;
    for (dim, n) in [(2, 32), (3, 16)] {
        let g = Grid::new(GridSpec::new(dim, n, 3.0)).unwrap();
        for i in 0..50u64 {
            let w = band_limited_solenoidal(&g, 1.0, 2000 + i, 5).unwrap();
            assert!(w.means().iter().all(|m| m.abs() < 1e-14));
            let (full, sym) = korn_quadrature(&w);
            worst = worst.max((full - 2.0 * sym).abs() / full);
            let (fs, ss) = (grad_norm_sq(&w), strain_norm_sq(&w));
            worst_spectral = worst_spectral.max((fs - 2.0 * ss).abs() / fs).max((fs - full).abs() / full);
            count += 1;
        }
    }
    outcome(
        worst <= 1e-12 && worst_spectral <= 1e-12,
        format!(
            "{count} fields: quadrature {worst:.3e}, spectral {worst_spectral:.3e} relative (limit 1e-12)"
        ),
    )
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn determinism() -> Outcome {
    let mut names: Vec<String> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("accept_") && n.ends_with(".json"))
        .collect();
    names.sort();
    let tmp = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    let mut files = 0;
    for name in &names {
        let (cfg, base) = config(name);
        let runs: Vec<_> = (0..2)
            .map(|k| {
                let out = tmp.path().join(format!("{name}.{k}"));
                simulate(&cfg, &base, &out).expect("simulate runs");
                dir_bytes(&out)
            })
            .collect();
        files += runs[0].len();
        if runs[0] != runs[1] {
            differing.push(name.clone());
        }
    }

    // a short oracle segment, compared through its snapshot bytes
    let (mut cfg, base) = config("accept_oracle_2d.json");
    cfg.step.t_end = 1e-3;
    let oracle_bytes: Vec<_> = (0..2)
        .map(|_| {
            let c = oracle_compare(&cfg, &base).expect("oracle segment runs");
            (Snapshot::of(&c.solver).to_bytes(), Snapshot::of(&c.oracle).to_bytes())
        })
        .collect();
    if oracle_bytes[0] != oracle_bytes[1] {
        differing.push("oracle segment".into());
    }
    outcome(
        differing.is_empty() && !names.is_empty(),
        format!(
            "{} configs ({files} output files) and an oracle segment rerun; differing: {}",
            names.len(),
            if differing.is_empty() { "none".to_string() } else { differing.join(", ") }
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |label: &'static str, o: Outcome| {
        println!("{} {label}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((label, o));
    };
    let (c1, c2) = mass_and_divergence();
    report("1 mass conservation", c1);
    report("2 velocity divergence and mean", c2);
    report("3 variational derivative", variational_derivative());
    report("4 energy identity 2D", energy_identity_2d());
    report("5 energy inequality 3D", energy_inequality_3d());
    report("6 gradient-flow monotonicity", gradient_flow_monotone());
    report("7 oracle equivalence", oracle_equivalence());
    report("8 continuous dependence", continuous_dependence());
    report("9 trilinear identities", trilinear_identities());
    report("10 Korn equality", korn_equality());
    report("11 determinism", determinism());
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nspfc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nspfc")).args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example_2d.json")
}

const SMALL: &str = r#"{
    "grid": { "dim": 2, "n": 16, "box_length": 8.0 },
    "params": { "r": -0.3, "eta": { "kind": "smooth_monotone", "lower": 0.5, "upper": 1.5, "slope_cap": 0.5 } },
    "step": { "dt": 0.001, "t_end": T_END },
    "initial": {
        "phi": { "kind": "constant_plus_noise", "mean": 0.07, "amplitude": 0.2, "seed": 3, "cutoff": 2 },
        "u": { "kind": "random_solenoidal", "amplitude": 0.2, "seed": 4, "cutoff": 2 }
    },
    "output": { "directory": "run", "diagnostics": ["ledger", "snapshots"] },
    "audit": { "pairs": 2 }
}"#;

fn write_small(dir: &Path, t_end: &str) -> PathBuf {
    let p = dir.join("small.json");
    std::fs::write(&p, SMALL.replace("T_END", t_end)).unwrap();
    p
}

#[test]
fn validate_shipped_example() {
    let o = nspfc(&["validate", example().to_str().unwrap()], Path::new("."));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("valid"));
}

#[test]
fn simulate_with_zero_horizon_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small(dir.path(), "0.0");
    let o = nspfc(&["simulate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("run/ledger.csv")).unwrap();
    assert_eq!(csv, "step,t,kinetic,sh,visc_diss,mob_diss,residual,mass,phi_h2,phi_h3,u_h,u_v,psi_h1\n");
    assert!(dir.path().join("run/final.bin").exists());
}

#[test]
fn simulate_out_flag_overrides_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small(dir.path(), "0.005");
    let o = nspfc(&["simulate", cfg.to_str().unwrap(), "--out", "elsewhere"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("elsewhere/ledger.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(dir.path().join("elsewhere/snap_00000005.bin").exists());
    assert!(!dir.path().join("run").exists());
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{ "grid": { "dim": 2, "n": 16 }, "step": { "dt": 0.1, "t_end": 1 }, "bogus": 1 }"#).unwrap();
    let o = nspfc(&["validate", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());

    let o = nspfc(&["simulate", "missing.json"], dir.path());
    assert_eq!(code(&o), 1);

    let o = nspfc(&["no-such-command"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn failed_check_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small(dir.path(), "0.01");
    let o = nspfc(&["grad-check", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = nspfc(&["grad-check", cfg.to_str().unwrap(), "--max-error", "1e-30"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("check failed"));
}

#[test]
fn blow_up_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("blow.json");
    std::fs::write(
        &cfg,
        r#"{ "grid": { "dim": 2, "n": 16, "box_length": 8.0 },
             "params": { "r": -0.3 },
             "step": { "dt": 1.0, "t_end": 200.0, "stabilization_s": 0.0 },
             "initial": { "phi": { "kind": "constant_plus_noise", "mean": 0.0, "amplitude": 20.0, "seed": 1, "cutoff": 3 } } }"#,
    )
    .unwrap();
    let o = nspfc(&["simulate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up"));
}

#[test]
fn mass_audit_and_cont_dep_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_small(dir.path(), "0.01");
    let o = nspfc(&["--json", "mass-audit", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["steps"], 10);
    assert!(v["max_mass_drift"].as_f64().unwrap() <= 1e-12);

    let o = nspfc(&["cont-dep", cfg.to_str().unwrap(), "--delta", "0"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("degenerate"));
    let o = nspfc(&["cont-dep", cfg.to_str().unwrap(), "--delta", "1e-6"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn oracle_compare_writes_both_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("oracle.json");
    std::fs::write(
        &cfg,
        r#"{ "grid": { "dim": 2, "n": 16, "box_length": 12.566370614359172, "dealias_fraction": 0.25 },
             "params": { "r": -0.3 },
             "step": { "dt": 1e-5, "t_end": 1e-4, "stabilization_s": 0.0 },
             "initial": {
                 "phi": { "kind": "constant_plus_noise", "mean": 0.1, "amplitude": 0.05, "seed": 8, "cutoff": 2 },
                 "u": { "kind": "random_solenoidal", "amplitude": 0.05, "seed": 7, "cutoff": 2 } },
             "oracle": { "n_modes": 2, "dt": 1e-6 } }"#,
    )
    .unwrap();
    let o = nspfc(&["oracle-compare", cfg.to_str().unwrap(), "--out", "cmp"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read(dir.path().join("cmp/solver.bin")).unwrap();
    let b = std::fs::read(dir.path().join("cmp/oracle.bin")).unwrap();
    assert_eq!(a.len(), b.len());
    assert_eq!(&a[..16], b"NSPFCSNAP\0v1\0\0\0\0");
}

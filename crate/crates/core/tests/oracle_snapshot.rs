use std::path::Path;

use nspfc_core::experiments::oracle_compare;
use nspfc_core::integrator::run;
use nspfc_core::io::{load_state, parse_config, write_snapshot};
use nspfc_core::spectral::Grid;

#[test]
fn oracle_snapshot_loads_into_solver_grid() {
    let cfg = parse_config(
        r#"{
        "grid": { "dim": 2, "n": 16, "box_length": 12.566370614359172, "dealias_fraction": 0.25 },
        "params": { "r": -0.3,
                    "eta": { "kind": "smooth_monotone", "lower": 0.5, "upper": 1.5, "slope_cap": 0.5 },
                    "mobility": { "kind": "smooth_monotone", "lower": 0.8, "upper": 1.2, "slope_cap": 0.2 } },
        "step": { "dt": 1e-5, "t_end": 2e-4, "stabilization_s": 0.0 },
        "initial": {
            "phi": { "kind": "constant_plus_noise", "mean": 0.1, "amplitude": 0.05, "seed": 8, "cutoff": 2 },
            "u": { "kind": "random_solenoidal", "amplitude": 0.05, "seed": 7, "cutoff": 2 }
        },
        "oracle": { "n_modes": 2, "dt": 1e-6 }
    }"#,
    )
    .unwrap();
    let c = oracle_compare(&cfg, Path::new(".")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.bin");
    write_snapshot(&c.oracle, &path).unwrap();

    let grid = Grid::new(cfg.grid).unwrap();
    let loaded = load_state(&path, &grid).unwrap();
    assert_eq!(loaded.t, c.oracle.t);
    assert!(loaded.max_divergence() <= 1e-12);
    let gap = loaded.phi.axpy(-1.0, &c.solver.phi).l2_norm();
    assert!(gap <= 1e-8, "{gap:e}");

    // the loaded state is a valid starting point for the solver
    let mut step = cfg.step;
    step.t_end = loaded.t + 10.0 * step.dt;
    let rec = run(loaded, &cfg.params, &step, 1, &mut []).unwrap();
    assert_eq!(rec.steps, 10);
}

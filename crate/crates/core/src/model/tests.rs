use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::io::noise::{band_limited_scalar, band_limited_solenoidal};
use crate::spectral::{
    apply_multiplier, divergence, laplacian, strain_norm_sq, Grid, GridSpec, Multiplier,
    ScalarField, VectorField,
};

fn grid(dim: usize, n: usize, l: f64) -> Arc<Grid> {
    Grid::new(GridSpec::new(dim, n, l)).unwrap()
}

fn params(r: f64) -> PhysParams {
    PhysParams::new(
        1.0,
        r,
        CoefficientFamily::smooth(0.5, 1.5),
        CoefficientFamily::smooth(0.8, 1.2),
    )
}

#[test]
fn f_eval_examples() {
    let g = grid(2, 8, 1.0);
    assert_eq!(f_eval(&ScalarField::zeros(&g), 0.3).max_abs(), 0.0);
    let one = f_eval(&ScalarField::constant(&g, 1.0), -0.5);
    assert!(one.values().iter().all(|&v| (v - 1.5).abs() < 1e-15));
    let phi = band_limited_scalar(&g, 0.0, 0.5, 3, 2).unwrap();
    let a = f_eval(&phi, 0.2);
    let b = f_eval(&phi.scale(-1.0), 0.2);
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x + y).abs() < 1e-15);
    }
}

#[test]
fn chemical_potential_of_constant() {
    let g = grid(2, 16, 1.0);
    let p = params(-0.4);
    let psi = chemical_potential(&ScalarField::constant(&g, 0.3), &p);
    let expected = 0.027 + 0.6 * 0.3;
    assert!(psi.values().iter().all(|&v| (v - expected).abs() < 1e-14));
}

#[test]
fn chemical_potential_linear_part_on_cosine() {
    let g = grid(2, 16, 1.0);
    let p = params(0.0).with_bulk(Bulk::Off);
    let a = 0.3;
    let phi = ScalarField::from_fn(&g, |x| a * (2.0 * PI * x[0]).cos());
    let psi = chemical_potential(&phi, &p);
    let lam = 16.0 * PI.powi(4) - 8.0 * PI * PI;
    for (i, &v) in psi.values().iter().enumerate() {
        let want = lam * phi.values()[i];
        assert!((v - want).abs() < 1e-10 * lam);
    }
}

#[test]
fn chemical_potential_mean_equals_mean_of_f() {
    let g = grid(2, 32, 6.0);
    let p = params(-0.3);
    for seed in 0..5 {
        let phi = band_limited_scalar(&g, 0.1, 0.8, seed, 6).unwrap();
        let psi = chemical_potential(&phi, &p);
        let f = f_eval(&phi, p.r);
        assert!((psi.mean() - f.mean()).abs() < 1e-13);
        assert!((psi.mean() - f.sample_mean()).abs() < 1e-13);
    }
}

#[test]
fn sh_energy_of_constant() {
    let g = grid(3, 8, 1.5);
    let p = params(0.4);
    let c = -0.6f64;
    let e = sh_energy(&ScalarField::constant(&g, c), &p);
    let want = (c.powi(4) / 4.0 + 1.4 * c * c / 2.0) * 1.5f64.powi(3);
    assert!((e - want).abs() < 1e-14);
}

/// Trapezoidal quadrature of the energy density of `A cos(2 pi x)` with exact derivatives.
fn cosine_energy_oracle(a: f64, r: f64, samples: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..samples {
        let x = i as f64 / samples as f64;
        let w = 2.0 * PI;
        let phi = a * (w * x).cos();
        let dphi = -a * w * (w * x).sin();
        let lap = -w * w * phi;
        acc += 0.5 * lap * lap - dphi * dphi + potential_f(phi, r);
    }
    acc / samples as f64
}

#[test]
fn sh_energy_of_cosine_against_fine_quadrature() {
    let n = 16;
    let g = grid(2, n, 1.0);
    let (a, r) = (0.7, -0.25);
    let p = params(r);
    let phi = ScalarField::from_fn(&g, |x| a * (2.0 * PI * x[0]).cos());
    let e = sh_energy(&phi, &p);
    let oracle = cosine_energy_oracle(a, r, 8 * n);
    assert!((e - oracle).abs() < 1e-10 * oracle.abs(), "{e} vs {oracle}");
    // closed form, for the record
    let closed = 0.5 * 16.0 * PI.powi(4) * a * a / 2.0 - 4.0 * PI * PI * a * a / 2.0
        + 3.0 * a.powi(4) / 8.0 / 4.0
        + (r + 1.0) * a * a / 4.0;
    assert!((oracle - closed).abs() < 1e-10 * closed.abs());
}

#[test]
fn sh_energy_is_translation_invariant() {
    let g = grid(2, 32, 4.0);
    let p = params(-0.3);
    let phi = band_limited_scalar(&g, 0.05, 0.6, 7, 5).unwrap();
    // shift by 3 cells along x and 5 along y
    let n = 32;
    let shifted: Vec<f64> = (0..n * n)
        .map(|flat| {
            let (i, j) = (flat / n, flat % n);
            phi.values()[((i + 3) % n) * n + (j + 5) % n]
        })
        .collect();
    let s = ScalarField::from_values(&g, shifted);
    let (e0, e1) = (sh_energy(&phi, &p), sh_energy(&s, &p));
    assert!((e0 - e1).abs() < 1e-12 * e0.abs().max(1.0));
}

#[test]
fn variational_derivative_has_second_order_consistency() {
    let g = grid(2, 32, 8.0);
    let p = params(-0.3);
    for seed in 0..3 {
        let phi = band_limited_scalar(&g, 0.1, 0.4, 100 + seed, 4).unwrap();
        let v = band_limited_scalar(&g, 0.0, 0.4, 200 + seed, 4).unwrap();
        let psi = chemical_potential(&phi, &p);
        let exact = psi.inner(&v);
        let mut errs = Vec::new();
        for eps in [1e-2, 1e-3] {
            let fd = (sh_energy(&phi.axpy(eps, &v), &p) - sh_energy(&phi.axpy(-eps, &v), &p)) / (2.0 * eps);
            errs.push((fd - exact).abs());
        }
        let order = (errs[0] / errs[1]).log10();
        assert!(order > 1.9, "order {order}");
    }
}

#[test]
fn rhs_phi_vanishes_for_uniform_phase() {
    let g = grid(2, 16, 3.0);
    let u = band_limited_solenoidal(&g, 0.5, 1, 3).unwrap();
    let st = State::new(u, ScalarField::constant(&g, 0.2), 0.0).unwrap();
    assert!(rhs_phi(&st, &params(-0.2)).max_abs() < 1e-13);
}

#[test]
fn rhs_phi_without_flow_is_mobility_times_laplacian_of_psi() {
    let g = grid(2, 32, 10.0);
    let m = 0.7;
    let p = PhysParams::new(1.0, -0.2, CoefficientFamily::constant(1.0), CoefficientFamily::constant(m));
    let phi = band_limited_scalar(&g, 0.0, 0.5, 8, 5).unwrap();
    let st = State::new(VectorField::zeros(&g), phi.clone(), 0.0).unwrap();
    let rhs = rhs_phi(&st, &p);
    let psi = chemical_potential(&phi, &p);
    let want = laplacian(&psi).scale(m);
    let scale = want.max_abs();
    for (a, b) in rhs.values().iter().zip(want.values()) {
        assert!((a - b).abs() < 1e-12 * scale);
    }
}

#[test]
fn rhs_phi_zero_mode_is_exactly_zero() {
    let g = grid(2, 32, 12.0);
    let p = params(-0.3);
    for seed in 0..10 {
        let u = band_limited_solenoidal(&g, 0.5, seed, 6).unwrap();
        let phi = band_limited_scalar(&g, 0.1, 0.5, 50 + seed, 6).unwrap();
        let st = State::new(u, phi, 0.0).unwrap();
        let r = rhs_phi(&st, &p);
        assert_eq!(r.coeffs()[0].re, 0.0);
        assert!(r.sample_mean().abs() < 1e-14);
    }
}

#[test]
fn rhs_u_vanishes_at_rest_with_uniform_phase() {
    let g = grid(3, 8, 2.0);
    let st = State::uniform(&g, 0.4);
    let psi = chemical_potential(&st.phi, &params(0.1));
    assert!(rhs_u(&st, &psi, &params(0.1)).unwrap().max_abs() == 0.0);
}

#[test]
fn shear_mode_decays_at_half_viscous_rate() {
    let g = grid(2, 16, 1.0);
    let eta = 0.8;
    let p = PhysParams::new(1.0, 0.0, CoefficientFamily::constant(eta), CoefficientFamily::constant(1.0));
    let u = VectorField::from_fn(&g, |x| vec![(2.0 * PI * x[1]).sin(), 0.0]);
    let st = State::new(u.clone(), ScalarField::constant(&g, 0.3), 0.0).unwrap();
    let psi = chemical_potential(&st.phi, &p);
    let rhs = rhs_u(&st, &psi, &p).unwrap();
    let want = -2.0 * PI * PI * eta;
    for c in 0..2 {
        for (a, b) in rhs.comp(c).values().iter().zip(u.comp(c).values()) {
            assert!((a - want * b).abs() < 1e-11);
        }
    }
}

#[test]
fn divergence_of_strain_is_half_laplacian_for_solenoidal_fields() {
    let g = grid(3, 16, 1.0);
    let u = band_limited_solenoidal(&g, 1.0, 4, 4).unwrap();
    let grads = crate::spectral::velocity_gradient(&u);
    for i in 0..3 {
        let strain_row: Vec<ScalarField> = (0..3)
            .map(|j| grads[i][j].axpy(1.0, &grads[j][i]).scale(0.5))
            .collect();
        let div = divergence(&VectorField::new(strain_row).unwrap());
        let half_lap = apply_multiplier(u.comp(i), &Multiplier::laplacian(&g)).unwrap().scale(0.5);
        let scale = half_lap.max_abs();
        for (a, b) in div.values().iter().zip(half_lap.values()) {
            assert!((a - b).abs() < 1e-12 * scale);
        }
    }
}

#[test]
fn skew_advection_injects_no_energy() {
    for (dim, n) in [(2, 32), (3, 16)] {
        let g = grid(dim, n, 1.0);
        let cutoff = g.spec().dealias_cutoff();
        for seed in 0..(if dim == 2 { 100 } else { 10 }) {
            let u = band_limited_solenoidal(&g, 1.0, seed, cutoff).unwrap();
            let adv = skew_advection(&u);
            let scale = u.max_abs() * crate::spectral::grad_norm_sq(&u).sqrt() * u.l2_norm();
            let work = adv.inner(&u);
            assert!(work.abs() <= 1e-12 * scale, "dim {dim} seed {seed}: {work:e}");
        }
    }
}

#[test]
fn trilinear_identities() {
    let g = grid(2, 32, 1.0);
    let cutoff = g.spec().dealias_cutoff();
    for seed in 0..10 {
        let u = band_limited_solenoidal(&g, 1.0, 3 * seed, cutoff).unwrap();
        let v = band_limited_solenoidal(&g, 1.0, 3 * seed + 1, cutoff).unwrap();
        let w = band_limited_solenoidal(&g, 1.0, 3 * seed + 2, cutoff).unwrap();
        let scale = u.max_abs() * crate::spectral::grad_norm_sq(&v).sqrt() * w.l2_norm();
        assert!(trilinear_b0(&u, &v, &v).unwrap().abs() <= 1e-12 * scale);
        let s = trilinear_b0(&u, &v, &w).unwrap() + trilinear_b0(&u, &w, &v).unwrap();
        assert!(s.abs() <= 1e-12 * scale);
    }
    let z = VectorField::zeros(&g);
    let v = band_limited_solenoidal(&g, 1.0, 1, 4).unwrap();
    assert_eq!(trilinear_b0(&z, &v, &v).unwrap(), 0.0);
}

#[test]
fn trilinear_rejects_mixed_grids() {
    let a = grid(2, 8, 1.0);
    let b = grid(2, 16, 1.0);
    let u = VectorField::zeros(&a);
    let v = VectorField::zeros(&b);
    assert!(trilinear_b0(&u, &v, &u).is_err());
}

#[test]
fn coefficient_fields_respect_bounds() {
    let g = grid(2, 32, 5.0);
    let p = params(0.0);
    let phi = band_limited_scalar(&g, 0.0, 30.0, 2, 8).unwrap();
    let eta = phi.map(|s| p.eta.value(s));
    let (lo, hi) = p.eta.bounds();
    assert!(eta.values().iter().all(|&v| v >= lo && v <= hi));
}

#[test]
fn korn_equality() {
    let g = grid(3, 16, 1.0);
    for seed in 0..5 {
        let u = band_limited_solenoidal(&g, 1.0, seed, 5).unwrap();
        let a = crate::spectral::grad_norm_sq(&u);
        let b = 2.0 * strain_norm_sq(&u);
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn dissipation_rates_for_shear_mode() {
    // u = (sin 2 pi y, 0): |Du|^2 = 2 * (pi cos 2 pi y)^2, integral = pi^2
    let g = grid(2, 16, 1.0);
    let eta = 0.6;
    let p = PhysParams::new(2.0, 0.0, CoefficientFamily::constant(eta), CoefficientFamily::constant(1.0));
    let u = VectorField::from_fn(&g, |x| vec![(2.0 * PI * x[1]).sin(), 0.0]);
    let st = State::new(u, ScalarField::constant(&g, 0.1), 0.0).unwrap();
    let psi = chemical_potential(&st.phi, &p);
    let (visc, mob) = dissipation_rates(&st, &psi, &p);
    assert!((visc - eta * PI * PI / 2.0).abs() < 1e-12);
    assert!(mob.abs() < 1e-20);
    assert!((kinetic_energy(&st.u, &p) - 0.5 / 4.0).abs() < 1e-14);
}

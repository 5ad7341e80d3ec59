//! Free energy, chemical potential and the right-hand sides of the coupled system.

use rustfft::num_complex::Complex64;

use super::params::{potential_f, PhysParams};
use super::state::State;
use crate::error::Result;
use crate::par;
use crate::spectral::{
    derivative_coeffs, ensure_grids, leray_coeffs, mask_coeffs, Grid, ScalarField, VectorField,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Forward transform of real samples followed by truncation to the dealias mask.
fn dealiased_coeffs(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut c = grid.forward(values);
    mask_coeffs(grid, &mut c);
    c
}

/// `f(phi) = phi^3 + (r + 1) phi`, evaluated pointwise and dealiased.
pub fn f_eval(phi: &ScalarField, r: f64) -> ScalarField {
    let v = phi.values();
    let grid = phi.grid();
    let vals = par::collect(v.len(), |i| {
        let s = v[i];
        s * s * s + (r + 1.0) * s
    });
    ScalarField::from_coeffs(grid, dealiased_coeffs(grid, &vals))
}

/// Chemical potential `psi = Delta^2 phi + 2 Delta phi + f(phi)`.
pub fn chemical_potential(phi: &ScalarField, params: &PhysParams) -> ScalarField {
    let grid = phi.grid();
    let t = grid.tables();
    let v = phi.values();
    let fv = par::collect(v.len(), |i| params.f(v[i]));
    let fc = dealiased_coeffs(grid, &fv);
    let pc = phi.coeffs();
    let coeffs = par::collect(pc.len(), |i| pc[i] * (t.k4[i] - 2.0 * t.ksq[i]) + fc[i]);
    ScalarField::from_coeffs(grid, coeffs)
}

/// Swift-Hohenberg free energy
/// `int 1/2 |Delta phi|^2 - |grad phi|^2 + F(phi)`.
///
/// Quadratic terms are summed spectrally, the quartic part of `F` by grid quadrature.
pub fn sh_energy(phi: &ScalarField, params: &PhysParams) -> f64 {
    let grid = phi.grid();
    let t = grid.tables();
    let c = phi.coeffs();
    let n_tot = grid.len() as f64;
    let bulk_on = params.bulk == super::params::Bulk::Cubic;
    let lin = if bulk_on { 0.5 * (params.r + 1.0) } else { 0.0 };
    let quad = par::sum(c.len(), |i| {
        (0.5 * t.k4[i] - t.ksq[i] + lin) * c[i].norm_sqr()
    }) * grid.volume()
        / (n_tot * n_tot);
    let quartic = if bulk_on {
        let v = phi.values();
        par::sum(v.len(), |i| {
            let s2 = v[i] * v[i];
            0.25 * s2 * s2
        }) * grid.cell_volume()
    } else {
        0.0
    };
    quad + quartic
}

/// Energy density integral `int F(phi)` by grid quadrature (diagnostic helper).
pub fn bulk_energy(phi: &ScalarField, r: f64) -> f64 {
    let v = phi.values();
    par::sum(v.len(), |i| potential_f(v[i], r)) * phi.grid().cell_volume()
}

/// Real-space gradient samples of a field given by its coefficients.
pub(crate) fn gradient_values(grid: &Grid, coeffs: &[Complex64]) -> Vec<Vec<f64>> {
    (0..grid.dim())
        .map(|a| grid.backward(&derivative_coeffs(grid, coeffs, a)))
        .collect()
}

/// `sum_a i k_a F_a` for dealiased flux components given in real space.
fn divergence_of_fluxes(grid: &Grid, fluxes: &[Vec<f64>]) -> Vec<Complex64> {
    let t = grid.tables();
    let fc: Vec<Vec<Complex64>> = fluxes.iter().map(|f| dealiased_coeffs(grid, f)).collect();
    par::collect(grid.len(), |i| {
        let mut acc = Complex64::default();
        for (a, c) in fc.iter().enumerate() {
            acc += I * t.k_odd[a][i] * c[i];
        }
        acc
    })
}

/// Phase-field tendency `-div(u phi) + div(m(phi) grad psi)` as spectral coefficients.
///
/// The zero mode is exactly zero because every term is a divergence.
pub(crate) fn rhs_phi_coeffs(state: &State, psi: &ScalarField, params: &PhysParams) -> Vec<Complex64> {
    let grid = state.grid();
    let phi = state.phi.values();
    let grad_psi = gradient_values(grid, psi.coeffs());
    let fluxes: Vec<Vec<f64>> = (0..grid.dim())
        .map(|a| {
            let g = &grad_psi[a];
            let u = state.u.comp(a).values();
            let flow = params.hydrodynamics;
            par::collect(grid.len(), |i| {
                let diffusive = params.mobility.value(phi[i]) * g[i];
                if flow {
                    diffusive - u[i] * phi[i]
                } else {
                    diffusive
                }
            })
        })
        .collect();
    divergence_of_fluxes(grid, &fluxes)
}

pub fn rhs_phi_with_psi(state: &State, psi: &ScalarField, params: &PhysParams) -> Result<ScalarField> {
    ensure_grids(&[state.grid(), psi.grid()])?;
    Ok(ScalarField::from_coeffs(
        state.grid(),
        rhs_phi_coeffs(state, psi, params),
    ))
}

/// Right-hand side of the phase-field equation.
pub fn rhs_phi(state: &State, params: &PhysParams) -> ScalarField {
    let psi = chemical_potential(&state.phi, params);
    ScalarField::from_coeffs(state.grid(), rhs_phi_coeffs(state, &psi, params))
}

/// Velocity gradient samples `g[i][j] = d_j u_i`.
pub(crate) fn velocity_gradient_values(u: &VectorField) -> Vec<Vec<Vec<f64>>> {
    let grid = u.grid();
    u.comps()
        .iter()
        .map(|c| gradient_values(grid, c.coeffs()))
        .collect()
}

/// Skew-symmetric advection `1/2 [(u.grad)u + div(u (x) u)]` as dealiased coefficients.
fn skew_advection_coeffs(u: &VectorField, grad: &[Vec<Vec<f64>>]) -> Vec<Vec<Complex64>> {
    let grid = u.grid();
    let t = grid.tables();
    let dim = u.dim();
    let uv: Vec<&[f64]> = u.comps().iter().map(|c| c.values()).collect();
    (0..dim)
        .map(|i| {
            let conv = par::collect(grid.len(), |m| {
                (0..dim).map(|j| uv[j][m] * grad[i][j][m]).sum::<f64>()
            });
            let conv_c = dealiased_coeffs(grid, &conv);
            let mut out = conv_c;
            for j in 0..dim {
                let prod = par::collect(grid.len(), |m| uv[j][m] * uv[i][m]);
                let pc = dealiased_coeffs(grid, &prod);
                let kj = &t.k_odd[j];
                for (m, o) in out.iter_mut().enumerate() {
                    *o += I * kj[m] * pc[m];
                }
            }
            out.iter_mut().for_each(|c| *c *= 0.5);
            out
        })
        .collect()
}

/// Skew-symmetric form of the inertia term.
pub fn skew_advection(u: &VectorField) -> VectorField {
    let grad = velocity_gradient_values(u);
    VectorField::from_coeffs(u.grid(), skew_advection_coeffs(u, &grad))
}

/// `div(eta(phi) D u)` as dealiased coefficients.
fn viscous_coeffs(u: &VectorField, phi: &[f64], grad: &[Vec<Vec<f64>>], params: &PhysParams) -> Vec<Vec<Complex64>> {
    let grid = u.grid();
    let t = grid.tables();
    let dim = u.dim();
    let eta = par::collect(grid.len(), |m| params.eta.value(phi[m]));
    // symmetric stress tau_ij = eta D_ij, computed once per unordered pair
    let mut tau: Vec<Vec<Option<Vec<Complex64>>>> = vec![vec![None; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let s = par::collect(grid.len(), |m| eta[m] * 0.5 * (grad[i][j][m] + grad[j][i][m]));
            tau[i][j] = Some(dealiased_coeffs(grid, &s));
        }
    }
    (0..dim)
        .map(|i| {
            let mut out = vec![Complex64::default(); grid.len()];
            for j in 0..dim {
                let tc = if i <= j { &tau[i][j] } else { &tau[j][i] };
                let tc = tc.as_ref().expect("stress filled");
                let kj = &t.k_odd[j];
                for (m, o) in out.iter_mut().enumerate() {
                    *o += I * kj[m] * tc[m];
                }
            }
            out
        })
        .collect()
}

/// Korteweg force `phi grad psi` as dealiased coefficients.
fn korteweg_coeffs(grid: &Grid, phi: &[f64], grad_psi: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    grad_psi
        .iter()
        .map(|g| {
            let s = par::collect(grid.len(), |m| phi[m] * g[m]);
            dealiased_coeffs(grid, &s)
        })
        .collect()
}

/// Velocity tendency `P[-(u.grad)u + div(eta(phi) D u) - M phi grad psi]` per component.
pub(crate) fn rhs_u_coeffs(state: &State, psi: &ScalarField, params: &PhysParams) -> Vec<Vec<Complex64>> {
    let grid = state.grid();
    let dim = grid.dim();
    if !params.hydrodynamics {
        return vec![vec![Complex64::default(); grid.len()]; dim];
    }
    let grad = velocity_gradient_values(&state.u);
    let adv = skew_advection_coeffs(&state.u, &grad);
    let visc = viscous_coeffs(&state.u, state.phi.values(), &grad, params);
    let grad_psi = gradient_values(grid, psi.coeffs());
    let kort = korteweg_coeffs(grid, state.phi.values(), &grad_psi);
    let m_c = params.coupling;
    let mut total: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            let (a, v, k) = (&adv[i], &visc[i], &kort[i]);
            par::collect(grid.len(), |m| v[m] - a[m] - k[m] * m_c)
        })
        .collect();
    leray_coeffs(grid, &mut total);
    total
}

/// Right-hand side of the momentum equation with the pressure projected out.
pub fn rhs_u(state: &State, psi: &ScalarField, params: &PhysParams) -> Result<VectorField> {
    ensure_grids(&[state.grid(), psi.grid()])?;
    Ok(VectorField::from_coeffs(
        state.grid(),
        rhs_u_coeffs(state, psi, params),
    ))
}

/// `b0(u, v, w) = int ((u.grad) v) . w` with the convective product dealiased.
pub fn trilinear_b0(u: &VectorField, v: &VectorField, w: &VectorField) -> Result<f64> {
    ensure_grids(&[u.grid(), v.grid(), w.grid()])?;
    let grid = u.grid();
    let dim = u.dim();
    let uv: Vec<&[f64]> = u.comps().iter().map(|c| c.values()).collect();
    let mut total = 0.0;
    for i in 0..dim {
        let g = gradient_values(grid, v.comp(i).coeffs());
        let conv = par::collect(grid.len(), |m| (0..dim).map(|j| uv[j][m] * g[j][m]).sum::<f64>());
        let conv = ScalarField::from_coeffs(grid, dealiased_coeffs(grid, &conv));
        total += conv.inner(w.comp(i));
    }
    Ok(total)
}

/// Viscous and mobility dissipation rates
/// `((1/M) int eta(phi) |D u|^2, int m(phi) |grad psi|^2)` by grid quadrature.
pub fn dissipation_rates(state: &State, psi: &ScalarField, params: &PhysParams) -> (f64, f64) {
    let grid = state.grid();
    let dim = grid.dim();
    let phi = state.phi.values();
    let dv = grid.cell_volume();
    let visc = if params.hydrodynamics {
        let g = velocity_gradient_values(&state.u);
        par::sum(grid.len(), |m| {
            let mut d2 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let d = 0.5 * (g[i][j][m] + g[j][i][m]);
                    d2 += d * d;
                }
            }
            params.eta.value(phi[m]) * d2
        }) * dv
            / params.coupling
    } else {
        0.0
    };
    let gp = gradient_values(grid, psi.coeffs());
    let mob = par::sum(grid.len(), |m| {
        let g2: f64 = (0..dim).map(|a| gp[a][m] * gp[a][m]).sum();
        params.mobility.value(phi[m]) * g2
    }) * dv;
    (visc, mob)
}

/// Kinetic energy `||u||^2 / (2M)`.
pub fn kinetic_energy(u: &VectorField, params: &PhysParams) -> f64 {
    let n2 = u.inner(u);
    n2 / (2.0 * params.coupling)
}

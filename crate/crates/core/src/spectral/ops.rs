use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::field::{same_grid, ScalarField, VectorField};
use super::grid::{Grid, GridSpec};
use crate::error::{Error, Result};
use crate::par;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A diagonal Fourier multiplier bound to the grid it was built for.
#[derive(Debug, Clone)]
pub struct Multiplier {
    spec: GridSpec,
    symbol: Vec<Complex64>,
}

impl Multiplier {
    pub fn from_fn(grid: &Grid, f: impl Fn(usize) -> Complex64 + Sync + Send) -> Self {
        Multiplier {
            spec: *grid.spec(),
            symbol: par::collect(grid.len(), f),
        }
    }

    pub fn real(grid: &Grid, f: impl Fn(usize) -> f64 + Sync + Send) -> Self {
        Self::from_fn(grid, |i| Complex64::new(f(i), 0.0))
    }

    /// Symbol of the Laplacian, `-|k|^2`.
    pub fn laplacian(grid: &Grid) -> Self {
        let t = grid.tables();
        Self::real(grid, |i| -t.ksq[i])
    }

    /// Symbol of the bi-Laplacian, `|k|^4`.
    pub fn bilaplacian(grid: &Grid) -> Self {
        let t = grid.tables();
        Self::real(grid, |i| t.k4[i])
    }

    /// Symbol of `Delta^2 + 2 Delta`, `|k|^4 - 2|k|^2`.
    pub fn swift_hohenberg(grid: &Grid) -> Self {
        let t = grid.tables();
        Self::real(grid, |i| t.k4[i] - 2.0 * t.ksq[i])
    }

    /// Symbol of `d/dx_axis`, Nyquist entry zeroed.
    pub fn derivative(grid: &Grid, axis: usize) -> Self {
        let k = &grid.tables().k_odd[axis];
        Self::from_fn(grid, |i| I * k[i])
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }
}

/// Multiplies the spectral coefficients of `field` by `table`.
pub fn apply_multiplier(field: &ScalarField, table: &Multiplier) -> Result<ScalarField> {
    if field.grid().spec() != &table.spec {
        return Err(Error::GridMismatch(format!(
            "field on {:?}, multiplier on {:?}",
            field.grid().spec(),
            table.spec
        )));
    }
    let (c, s) = (field.coeffs(), &table.symbol);
    Ok(ScalarField::from_coeffs(
        field.grid(),
        par::collect(c.len(), |i| c[i] * s[i]),
    ))
}

/// Zeroes coefficients outside the dealias mask in place.
pub fn mask_coeffs(grid: &Grid, coeffs: &mut [Complex64]) {
    let mask = &grid.tables().mask;
    par::for_each_chunk(coeffs, 1024, |b, chunk| {
        for (i, c) in chunk.iter_mut().enumerate() {
            if !mask[b * 1024 + i] {
                *c = Complex64::default();
            }
        }
    });
}

/// Truncates `field` to the dealias mask.
pub fn dealias(field: &ScalarField) -> ScalarField {
    let mut c = field.coeffs().to_vec();
    mask_coeffs(field.grid(), &mut c);
    ScalarField::from_coeffs(field.grid(), c)
}

/// Spectral derivative along `axis` of raw coefficients.
pub fn derivative_coeffs(grid: &Grid, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
    let k = &grid.tables().k_odd[axis];
    par::collect(coeffs.len(), |i| I * k[i] * coeffs[i])
}

pub fn derivative(field: &ScalarField, axis: usize) -> ScalarField {
    ScalarField::from_coeffs(
        field.grid(),
        derivative_coeffs(field.grid(), field.coeffs(), axis),
    )
}

pub fn gradient(field: &ScalarField) -> VectorField {
    let comps = (0..field.grid().dim())
        .map(|a| derivative(field, a))
        .collect();
    VectorField::new(comps).expect("gradient components share a grid")
}

/// Spectral coefficients of `div v`.
pub fn divergence_coeffs(grid: &Grid, comps: &[&[Complex64]]) -> Vec<Complex64> {
    let t = grid.tables();
    par::collect(grid.len(), |i| {
        let mut acc = Complex64::default();
        for (a, c) in comps.iter().enumerate() {
            acc += I * t.k_odd[a][i] * c[i];
        }
        acc
    })
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let comps: Vec<&[Complex64]> = v.comps().iter().map(|c| c.coeffs()).collect();
    ScalarField::from_coeffs(v.grid(), divergence_coeffs(v.grid(), &comps))
}

/// Max-norm of the real-space divergence computed spectrally.
pub fn max_divergence(v: &VectorField) -> f64 {
    divergence(v).max_abs()
}

pub fn laplacian(field: &ScalarField) -> ScalarField {
    let t = field.grid().tables();
    let c = field.coeffs();
    ScalarField::from_coeffs(field.grid(), par::collect(c.len(), |i| -t.ksq[i] * c[i]))
}

/// Leray projection of raw per-component coefficients, in place: `(I - k k^T / |k|^2)`
/// for every nonzero wavenumber and zero at `k = 0`.
pub fn leray_coeffs(grid: &Grid, comps: &mut [Vec<Complex64>]) {
    let t = grid.tables();
    let dim = grid.dim();
    let len = grid.len();
    let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); len]; dim];
    {
        let src: &[Vec<Complex64>] = comps;
        for (a, out_a) in out.iter_mut().enumerate() {
            par::fill(out_a, |i| {
                let q: f64 = (0..dim).map(|b| t.k_odd[b][i] * t.k_odd[b][i]).sum();
                if t.ksq[i] == 0.0 {
                    return Complex64::default();
                }
                if q == 0.0 {
                    // only Nyquist components: no resolved gradient direction
                    return src[a][i];
                }
                let mut kdotv = Complex64::default();
                for b in 0..dim {
                    kdotv += t.k_odd[b][i] * src[b][i];
                }
                src[a][i] - kdotv * (t.k_odd[a][i] / q)
            });
        }
    }
    for (c, o) in comps.iter_mut().zip(out) {
        *c = o;
    }
}

/// Projection onto divergence-free, zero-mean vector fields.
pub fn leray_project(v: &VectorField) -> VectorField {
    let mut comps: Vec<Vec<Complex64>> = v.comps().iter().map(|c| c.coeffs().to_vec()).collect();
    leray_coeffs(v.grid(), &mut comps);
    VectorField::from_coeffs(v.grid(), comps)
}

/// Velocity gradient coefficients `G[i][j] = d_j v_i`.
pub fn velocity_gradient(v: &VectorField) -> Vec<Vec<ScalarField>> {
    v.comps()
        .iter()
        .map(|c| (0..v.dim()).map(|j| derivative(c, j)).collect())
        .collect()
}

/// `||grad w||^2 = sum_ij ||d_j w_i||^2`, by Parseval.
pub fn grad_norm_sq(v: &VectorField) -> f64 {
    let t = v.grid().tables();
    v.comps()
        .iter()
        .map(|c| {
            super::field::spectral_weighted_sq(v.grid(), c.coeffs(), |i| {
                (0..v.dim()).map(|j| t.k_odd[j][i] * t.k_odd[j][i]).sum()
            })
        })
        .sum()
}

/// `||D w||^2` with `D w = (grad w + grad w^T) / 2`, by Parseval.
pub fn strain_norm_sq(v: &VectorField) -> f64 {
    let grid = v.grid();
    let t = grid.tables();
    let dim = v.dim();
    let vol = grid.volume();
    let n_tot = grid.len() as f64;
    let c: Vec<&[Complex64]> = v.comps().iter().map(|f| f.coeffs()).collect();
    let s = par::sum(grid.len(), |m| {
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let d = (I * t.k_odd[j][m] * c[i][m] + I * t.k_odd[i][m] * c[j][m]) * 0.5;
                acc += d.norm_sqr();
            }
        }
        acc
    });
    s * vol / (n_tot * n_tot)
}

/// Checks that all fields share one grid.
pub fn ensure_grids(grids: &[&Arc<Grid>]) -> Result<()> {
    for g in grids.iter().skip(1) {
        if !same_grid(grids[0], g) {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                grids[0].spec(),
                g.spec()
            )));
        }
    }
    Ok(())
}

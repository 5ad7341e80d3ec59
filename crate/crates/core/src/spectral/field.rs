use std::sync::Arc;

use rustfft::num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::par;

/// A real periodic scalar field held in both real-space and spectral form.
///
/// The two views are produced together by the constructors, so they agree
/// up to transform round-off.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "sample count does not match grid");
        let coeffs = grid.forward(&values);
        ScalarField {
            grid: grid.clone(),
            values,
            coeffs,
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient count does not match grid");
        let values = grid.backward(&coeffs);
        ScalarField {
            grid: grid.clone(),
            values,
            coeffs,
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64 + Sync + Send) -> Self {
        let values = par::collect(grid.len(), |i| f(&grid.point(i)));
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        let mut coeffs = vec![Complex64::default(); grid.len()];
        coeffs[0] = Complex64::new(c * grid.len() as f64, 0.0);
        ScalarField {
            grid: grid.clone(),
            values: vec![c; grid.len()],
            coeffs,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Mean value from the zero-wavenumber coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / self.grid.len() as f64
    }

    /// Mean value by real-space averaging.
    pub fn sample_mean(&self) -> f64 {
        let v = &self.values;
        par::sum(v.len(), |i| v[i]) / v.len() as f64
    }

    /// `L^2(Q)` inner product by grid quadrature.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        let (a, b) = (&self.values, &other.values);
        par::sum(a.len(), |i| a[i] * b[i]) * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `L^2(Q)` norm from the spectral coefficients (Parseval).
    pub fn spectral_l2_norm(&self) -> f64 {
        spectral_weighted_sq(&self.grid, &self.coeffs, |_| 1.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let v = &self.values;
        par::max(v.len(), |i| v[i].abs())
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        same_grid(&self.grid, &other.grid)
    }

    pub fn ensure_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid.spec(),
                other.grid.spec()
            )))
        }
    }

    /// Pointwise map in real space.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> ScalarField {
        let v = &self.values;
        ScalarField::from_values(&self.grid, par::collect(v.len(), |i| f(v[i])))
    }

    /// `self + s * other`, formed spectrally.
    pub fn axpy(&self, s: f64, other: &ScalarField) -> ScalarField {
        let (a, b) = (&self.coeffs, &other.coeffs);
        ScalarField::from_coeffs(&self.grid, par::collect(a.len(), |i| a[i] + b[i] * s))
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        let a = &self.coeffs;
        ScalarField::from_coeffs(&self.grid, par::collect(a.len(), |i| a[i] * s))
    }
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || a.spec() == b.spec()
}

/// `|Q| / N^2 * sum_k w(k) |c_k|^2`, i.e. the `L^2(Q)` norm squared of the field whose
/// coefficients are `sqrt(w) c`.
pub fn spectral_weighted_sq(grid: &Grid, coeffs: &[Complex64], w: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let n_tot = grid.len() as f64;
    par::sum(coeffs.len(), |i| w(i) * coeffs[i].norm_sqr()) * grid.volume() / (n_tot * n_tot)
}

/// A vector field with one scalar field per dimension.
#[derive(Debug, Clone)]
pub struct VectorField {
    comps: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(comps: Vec<ScalarField>) -> Result<Self> {
        let first = comps
            .first()
            .ok_or_else(|| Error::Config("vector field needs components".into()))?;
        if comps.len() != first.grid().dim() {
            return Err(Error::GridMismatch(format!(
                "{} components on a {}-dimensional grid",
                comps.len(),
                first.grid().dim()
            )));
        }
        for c in &comps[1..] {
            first.ensure_same_grid(c)?;
        }
        Ok(VectorField { comps })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        VectorField {
            comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Vec<Complex64>>) -> Self {
        assert_eq!(coeffs.len(), grid.dim());
        VectorField {
            comps: coeffs
                .into_iter()
                .map(|c| ScalarField::from_coeffs(grid, c))
                .collect(),
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> Vec<f64> + Sync + Send) -> Self {
        VectorField {
            comps: (0..grid.dim())
                .map(|c| ScalarField::from_fn(grid, |x| f(x)[c]))
                .collect(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.comps[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn comp(&self, c: usize) -> &ScalarField {
        &self.comps[c]
    }

    pub fn inner(&self, other: &VectorField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn means(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c.mean()).collect()
    }

    pub fn axpy(&self, s: f64, other: &VectorField) -> VectorField {
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.axpy(s, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn ensure_same_grid(&self, other: &ScalarField) -> Result<()> {
        self.comps[0].ensure_same_grid(other)
    }
}

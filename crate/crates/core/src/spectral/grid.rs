use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Discretization of the periodic box `(0, L)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    /// Samples (and Fourier modes) per dimension.
    pub n: usize,
    #[serde(default = "default_box_length")]
    pub box_length: f64,
    #[serde(default = "default_dealias_fraction")]
    pub dealias_fraction: f64,
}

fn default_box_length() -> f64 {
    1.0
}

fn default_dealias_fraction() -> f64 {
    2.0 / 3.0
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Self {
        GridSpec {
            dim,
            n,
            box_length,
            dealias_fraction: default_dealias_fraction(),
        }
    }

    pub fn with_dealias(mut self, fraction: f64) -> Self {
        self.dealias_fraction = fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::Config(format!(
                "grid.dim must be 2 or 3, got {}",
                self.dim
            )));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid.n must be a power of two >= 8, got {}",
                self.n
            )));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::Config(format!(
                "grid.box_length must be positive, got {}",
                self.box_length
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "dealias_fraction must lie in (0,1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Measure of the box, `L^d`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Largest retained |index| per axis under the dealias mask.
    pub fn dealias_cutoff(&self) -> usize {
        dealias_cutoff(self.n, self.dealias_fraction)
    }
}

/// Signed DFT index of storage position `p` on an axis of `n` points:
/// `0, 1, ..., n/2 - 1, -n/2, ..., -1`.
pub fn signed_index(p: usize, n: usize) -> i64 {
    if p < n / 2 {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

/// Per-axis angular wavenumbers `2 pi j / L` in storage order.
pub fn wavenumbers(n: usize, box_length: f64) -> Vec<f64> {
    (0..n)
        .map(|p| 2.0 * PI * signed_index(p, n) as f64 / box_length)
        .collect()
}

/// `floor(fraction * n / 2)`, guarded against representation error in the fraction.
pub fn dealias_cutoff(n: usize, fraction: f64) -> usize {
    (fraction * n as f64 / 2.0 + 1e-9).floor() as usize
}

/// Multiplier tables, indexed like the spectral coefficient arrays.
#[derive(Debug, Clone)]
pub struct Tables {
    /// Signed mode indices per component.
    pub index: Vec<Vec<i64>>,
    /// Wavenumber components including the Nyquist entry.
    pub k: Vec<Vec<f64>>,
    /// Wavenumber components with the Nyquist entry zeroed, for odd-order derivatives.
    pub k_odd: Vec<Vec<f64>>,
    pub ksq: Vec<f64>,
    pub k4: Vec<f64>,
    pub k6: Vec<f64>,
    pub mask: Vec<bool>,
}

/// Builds wavenumber and dealias tables for a validated grid.
pub fn build_tables(spec: &GridSpec) -> Result<Tables> {
    spec.validate()?;
    let (n, dim, len) = (spec.n, spec.dim, spec.len());
    let axis_k = wavenumbers(n, spec.box_length);
    let cutoff = spec.dealias_cutoff() as i64;
    let nyquist = -(n as i64 / 2);

    let mut index = vec![vec![0i64; len]; dim];
    let mut k = vec![vec![0.0; len]; dim];
    let mut k_odd = vec![vec![0.0; len]; dim];
    let mut ksq = vec![0.0; len];
    let mut mask = vec![true; len];
    for flat in 0..len {
        let mut rem = flat;
        // row-major: the last component varies fastest
        for c in (0..dim).rev() {
            let p = rem % n;
            rem /= n;
            let j = signed_index(p, n);
            index[c][flat] = j;
            k[c][flat] = axis_k[p];
            k_odd[c][flat] = if j == nyquist { 0.0 } else { axis_k[p] };
            ksq[flat] += axis_k[p] * axis_k[p];
            if j.abs() > cutoff {
                mask[flat] = false;
            }
        }
    }
    let k4: Vec<f64> = ksq.iter().map(|&q| q * q).collect();
    let k6: Vec<f64> = ksq.iter().map(|&q| q * q * q).collect();
    Ok(Tables {
        index,
        k,
        k_odd,
        ksq,
        k4,
        k6,
        mask,
    })
}

/// Target number of points handled by one parallel task inside a transform.
const TASK_POINTS: usize = 8192;

/// A validated grid together with its tables and FFT plans.
///
/// Immutable after construction and shared behind an `Arc`.
pub struct Grid {
    spec: GridSpec,
    tables: Tables,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Arc<Grid>> {
        let tables = build_tables(&spec)?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(spec.n);
        let inverse = planner.plan_fft_inverse(spec.n);
        Ok(Arc::new(Grid {
            spec,
            tables,
            forward,
            inverse,
        }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn tables(&self) -> &Tables {
        &self.tables
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn len(&self) -> usize {
        self.tables.ksq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume(&self) -> f64 {
        self.spec.volume()
    }

    /// Quadrature weight of one grid cell, `|Q| / N`.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Flat storage offset of a signed multi-index, or `None` when it is not representable.
    pub fn flat_index(&self, j: &[i64]) -> Option<usize> {
        let n = self.spec.n as i64;
        let mut flat = 0usize;
        for &jc in j {
            if jc < -n / 2 || jc >= n / 2 {
                return None;
            }
            let p = if jc < 0 { jc + n } else { jc };
            flat = flat * self.spec.n + p as usize;
        }
        Some(flat)
    }

    /// Physical coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let n = self.spec.n;
        let h = self.spec.box_length / n as f64;
        let mut x = vec![0.0; self.spec.dim];
        let mut rem = flat;
        for c in (0..self.spec.dim).rev() {
            x[c] = (rem % n) as f64 * h;
            rem /= n;
        }
        x
    }

    /// Unnormalized forward DFT of real samples.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        data
    }

    /// Inverse DFT divided by the sample count; the imaginary residue is discarded.
    pub fn backward(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut data = coeffs.to_vec();
        self.transform(&mut data, true);
        let scale = 1.0 / self.len() as f64;
        data.iter().map(|c| c.re * scale).collect()
    }

    /// Inverse DFT divided by the sample count, keeping both parts.
    pub fn backward_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut data = coeffs.to_vec();
        self.transform(&mut data, true);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        data
    }

    /// Unnormalized forward DFT of complex samples.
    pub fn forward_complex(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut data = values.to_vec();
        self.transform(&mut data, false);
        data
    }

    /// Multi-dimensional DFT by repeated last-axis transforms and cyclic axis rotation.
    fn transform(&self, data: &mut Vec<Complex64>, inverse: bool) {
        let n = self.spec.n;
        let len = data.len();
        debug_assert_eq!(len, self.len());
        let plan = if inverse { &self.inverse } else { &self.forward };
        // keep parallel tasks at a few thousand points so small grids run inline
        let rows_per_task = (TASK_POINTS / n).max(1);
        let stride = len / n;
        let out_rows_per_task = (TASK_POINTS / stride).max(1);
        let mut rotated = vec![Complex64::default(); len];
        for _ in 0..self.spec.dim {
            par::for_each_chunk(data, n * rows_per_task, |_, chunk| {
                let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(chunk, &mut scratch);
            });
            // (q, i_last) -> (i_last, q)
            let src: &[Complex64] = data;
            par::for_each_chunk(&mut rotated, stride * out_rows_per_task, |c, block| {
                for (r, row) in block.chunks_mut(stride).enumerate() {
                    let i_last = c * out_rows_per_task + r;
                    for (q, slot) in row.iter_mut().enumerate() {
                        *slot = src[q * n + i_last];
                    }
                }
            });
            std::mem::swap(data, &mut rotated);
        }
    }
}

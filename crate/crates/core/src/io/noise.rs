//! Seeded, grid-independent random initial data.
//!
//! Random coefficients come from SplitMix64: the state advances by
//! `0x9E3779B97F4A7C15`, the output is mixed by
//! `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`,
//! and a uniform deviate in `[-1, 1)` is `2 * (z >> 11) / 2^53 - 1`.
//!
//! Wavevectors `j` with `|j_i| <= cutoff` are visited in lexicographic order (first
//! component slowest), keeping only those whose first nonzero component is positive.
//! Each visited mode draws `alpha` then `beta` and contributes
//! `alpha cos(k.x) + beta sin(k.x)` with `k = 2 pi j / L`. The sum is scaled by
//! `amplitude / sqrt(count)`. Because the draws depend only on the seed and the mode
//! list, the same function is produced on every grid that resolves the cutoff.

use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{leray_project, Grid, ScalarField, VectorField};

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform deviate in `[-1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        2.0 * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64) - 1.0
    }
}

/// Nonzero wavevectors in `[-cutoff, cutoff]^dim` with positive leading nonzero component.
pub fn half_space_modes(dim: usize, cutoff: usize) -> Vec<Vec<i64>> {
    let c = cutoff as i64;
    let side = 2 * c + 1;
    let total = side.pow(dim as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut j = vec![0i64; dim];
        for slot in j.iter_mut().rev() {
            *slot = rem % side - c;
            rem /= side;
        }
        if let Some(first) = j.iter().find(|&&x| x != 0) {
            if *first > 0 {
                out.push(j);
            }
        }
    }
    out
}

/// Orthonormal directions perpendicular to `j` (one in 2D, two in 3D).
pub fn perpendicular_directions(j: &[i64]) -> Vec<Vec<f64>> {
    let v: Vec<f64> = j.iter().map(|&x| x as f64).collect();
    let norm = |a: &[f64]| a.iter().map(|x| x * x).sum::<f64>().sqrt();
    match v.len() {
        2 => {
            let n = norm(&v);
            vec![vec![-v[1] / n, v[0] / n]]
        }
        3 => {
            let cross = |a: &[f64], b: &[f64]| {
                vec![
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ]
            };
            // axis along the smallest component of j keeps the cross product well conditioned
            let mut axis = 0;
            for c in 1..3 {
                if v[c].abs() < v[axis].abs() {
                    axis = c;
                }
            }
            let mut a = vec![0.0; 3];
            a[axis] = 1.0;
            let e1 = cross(&v, &a);
            let n1 = norm(&e1);
            let e1: Vec<f64> = e1.iter().map(|x| x / n1).collect();
            let e2 = cross(&v, &e1);
            let n2 = norm(&e2);
            let e2: Vec<f64> = e2.iter().map(|x| x / n2).collect();
            vec![e1, e2]
        }
        d => panic!("unsupported dimension {d}"),
    }
}

fn check_cutoff(grid: &Grid, cutoff: usize) -> Result<()> {
    if cutoff == 0 || cutoff >= grid.n() / 2 {
        return Err(Error::Config(format!(
            "noise cutoff must lie in [1, {}] for n = {}, got {cutoff}",
            grid.n() / 2 - 1,
            grid.n()
        )));
    }
    Ok(())
}

/// Adds `alpha cos(k.x) + beta sin(k.x)` to raw coefficients.
pub(crate) fn add_mode(grid: &Grid, coeffs: &mut [Complex64], j: &[i64], alpha: f64, beta: f64) {
    let n_tot = grid.len() as f64;
    let plus = grid.flat_index(j).expect("mode representable");
    let neg: Vec<i64> = j.iter().map(|x| -x).collect();
    let minus = grid.flat_index(&neg).expect("mode representable");
    let c = Complex64::new(alpha, -beta) * (0.5 * n_tot);
    coeffs[plus] += c;
    coeffs[minus] += c.conj();
}

/// `mean + amplitude * (random band-limited field)`.
pub fn band_limited_scalar(
    grid: &Arc<Grid>,
    mean: f64,
    amplitude: f64,
    seed: u64,
    cutoff: usize,
) -> Result<ScalarField> {
    check_cutoff(grid, cutoff)?;
    let modes = half_space_modes(grid.dim(), cutoff);
    let scale = amplitude / (modes.len() as f64).sqrt();
    let mut rng = SplitMix64::new(seed);
    let mut coeffs = vec![Complex64::default(); grid.len()];
    coeffs[0] = Complex64::new(mean * grid.len() as f64, 0.0);
    for j in &modes {
        let alpha = rng.next_signed() * scale;
        let beta = rng.next_signed() * scale;
        add_mode(grid, &mut coeffs, j, alpha, beta);
    }
    Ok(ScalarField::from_coeffs(grid, coeffs))
}

/// Random band-limited divergence-free, zero-mean velocity.
pub fn band_limited_solenoidal(
    grid: &Arc<Grid>,
    amplitude: f64,
    seed: u64,
    cutoff: usize,
) -> Result<VectorField> {
    check_cutoff(grid, cutoff)?;
    let dim = grid.dim();
    let modes = half_space_modes(dim, cutoff);
    let count = modes.len() * (dim - 1);
    let scale = amplitude / (count as f64).sqrt();
    let mut rng = SplitMix64::new(seed);
    let mut coeffs = vec![vec![Complex64::default(); grid.len()]; dim];
    for j in &modes {
        for e in perpendicular_directions(j) {
            let alpha = rng.next_signed() * scale;
            let beta = rng.next_signed() * scale;
            for (c, ec) in e.iter().enumerate() {
                add_mode(grid, &mut coeffs[c], j, alpha * ec, beta * ec);
            }
        }
    }
    Ok(leray_project(&VectorField::from_coeffs(grid, coeffs)))
}

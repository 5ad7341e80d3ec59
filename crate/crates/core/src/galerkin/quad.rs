//! Pruned multi-dimensional DFT for spectra confined to a band `|j_i| <= K`.
//!
//! Synthesis only transforms lines that can hold a nonzero entry, and analysis only
//! completes the lines whose outputs land inside the band. Entries outside the band are
//! unspecified after [`BandFft::forward`].

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::spectral::Complex64;

#[derive(Clone)]
pub(super) struct BandFft {
    n: usize,
    dim: usize,
    /// Per-axis storage offsets inside the band, ascending.
    band: Vec<usize>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for BandFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BandFft")
            .field("n", &self.n)
            .field("dim", &self.dim)
            .field("band", &self.band)
            .finish()
    }
}

impl BandFft {
    pub(super) fn new(dim: usize, n: usize, k: usize) -> Self {
        assert!(2 * k < n, "band must fit inside the grid");
        let mut band: Vec<usize> = (0..=k).chain(n - k..n).collect();
        band.dedup();
        let mut planner = FftPlanner::new();
        BandFft {
            n,
            dim,
            band,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(super) fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Unnormalized inverse DFT of a spectrum that vanishes outside the band.
    pub(super) fn backward(&self, data: &mut [Complex64]) {
        for axis in 0..self.dim {
            self.axis_pass(data, axis, &*self.inverse);
        }
    }

    /// Unnormalized forward DFT, exact on the band only.
    pub(super) fn forward(&self, data: &mut [Complex64]) {
        for axis in (0..self.dim).rev() {
            self.axis_pass(data, axis, &*self.forward);
        }
    }

    /// Transforms every line along `axis` whose coordinates before it range over the
    /// full grid and after it over the band.
    fn axis_pass(&self, data: &mut [Complex64], axis: usize, fft: &dyn Fft<f64>) {
        let n = self.n;
        let d = self.dim;
        let stride = n.pow((d - 1 - axis) as u32);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::default(); n];

        // offsets of line starts: outer axes full, inner axes on the band
        let mut starts = vec![0usize];
        for b in 0..d {
            if b == axis {
                continue;
            }
            let sb = n.pow((d - 1 - b) as u32);
            let next: Vec<usize> = if b < axis {
                starts.iter().flat_map(|&s| (0..n).map(move |i| s + i * sb)).collect()
            } else {
                starts
                    .iter()
                    .flat_map(|&s| self.band.iter().map(move |&i| s + i * sb))
                    .collect()
            };
            starts = next;
        }

        if stride == 1 {
            for &s in &starts {
                fft.process_with_scratch(&mut data[s..s + n], &mut scratch);
            }
        } else {
            for &s in &starts {
                for (i, c) in line.iter_mut().enumerate() {
                    *c = data[s + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, c) in line.iter().enumerate() {
                    data[s + i * stride] = *c;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, GridSpec};

    fn band_spectrum(grid: &Grid, k: i64, seed: u64) -> Vec<Complex64> {
        let mut s = vec![Complex64::default(); grid.len()];
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let d = grid.dim();
        let side = 2 * k + 1;
        for flat in 0..side.pow(d as u32) {
            let mut rem = flat;
            let j: Vec<i64> = (0..d)
                .map(|_| {
                    let v = rem % side - k;
                    rem /= side;
                    v
                })
                .collect();
            s[grid.flat_index(&j).unwrap()] = Complex64::new(next(), next());
        }
        s
    }

    #[test]
    fn matches_full_transform() {
        for (dim, n, k) in [(2, 32, 4), (3, 16, 3), (2, 8, 1)] {
            let grid = Grid::new(GridSpec::new(dim, n, 1.0)).unwrap();
            let fft = BandFft::new(dim, n, k);
            let s = band_spectrum(&grid, k as i64, 3 + dim as u64);
            let full = grid.backward_complex(&s);
            let mut mine = s.clone();
            fft.backward(&mut mine);
            let scale = grid.len() as f64;
            for (a, b) in full.iter().zip(&mine) {
                assert!((a * scale - b).norm() < 1e-10);
            }
            let full_f = grid.forward_complex(&full);
            let mut mine_f = full.clone();
            fft.forward(&mut mine_f);
            let side = 2 * k as i64 + 1;
            for flat in 0..side.pow(dim as u32) {
                let mut rem = flat;
                let j: Vec<i64> = (0..dim)
                    .map(|_| {
                        let v = rem % side - k as i64;
                        rem /= side;
                        v
                    })
                    .collect();
                let idx = grid.flat_index(&j).unwrap();
                assert!((full_f[idx] - mine_f[idx]).norm() < 1e-10);
            }
        }
    }
}

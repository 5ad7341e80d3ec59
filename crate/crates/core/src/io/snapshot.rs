//! Binary field snapshots.
//!
//! Layout, all little-endian: the 16-byte magic `NSPFCSNAP\0v1\0\0\0\0`, `u32` dim,
//! `u32` n, `f64` box length, `f64` time, the `n^dim` real-space samples of `phi` in
//! row-major order, then each velocity component likewise.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::diagnostics::LedgerRow;
use crate::error::{Error, Result};
use crate::integrator::Observer;
use crate::model::State;
use crate::spectral::{Grid, ScalarField, VectorField};

pub const MAGIC: [u8; 16] = *b"NSPFCSNAP\0v1\0\0\0\0";
const HEADER_LEN: usize = 16 + 4 + 4 + 8 + 8;

/// Decoded snapshot contents, before they are attached to a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
    pub t: f64,
    pub phi: Vec<f64>,
    pub u: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn of(state: &State) -> Self {
        let spec = state.grid().spec();
        Snapshot {
            dim: spec.dim,
            n: spec.n,
            box_length: spec.box_length,
            t: state.t,
            phi: state.phi.values().to_vec(),
            u: state.u.comps().iter().map(|c| c.values().to_vec()).collect(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let samples = self.phi.len() * (1 + self.u.len());
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * samples);
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&self.box_length.to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        for v in self.phi.iter().chain(self.u.iter().flatten()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Decodes `bytes`; `path` only labels errors.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let err = |message: String| Error::Snapshot {
            path: path.to_path_buf(),
            message,
        };
        if bytes.len() < HEADER_LEN {
            return Err(err(format!(
                "truncated header: expected at least {HEADER_LEN} bytes, found {}",
                bytes.len()
            )));
        }
        if bytes[..16] != MAGIC {
            return Err(err("bad magic, not an NSPFCSNAP v1 file".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let dim = u32_at(16);
        let n = u32_at(20);
        if !(dim == 2 || dim == 3) || n == 0 {
            return Err(err(format!("unsupported header: dim = {dim}, n = {n}")));
        }
        let per = n
            .checked_pow(dim as u32)
            .ok_or_else(|| err(format!("grid {n}^{dim} is too large")))?;
        let expected = HEADER_LEN + 8 * per * (1 + dim);
        if bytes.len() != expected {
            return Err(err(format!(
                "expected {expected} bytes for a {dim}D grid with n = {n}, found {}",
                bytes.len()
            )));
        }
        let read_block = |b: usize| -> Vec<f64> {
            (0..per).map(|i| f64_at(HEADER_LEN + 8 * (b * per + i))).collect()
        };
        Ok(Snapshot {
            dim,
            n,
            box_length: f64_at(24),
            t: f64_at(32),
            phi: read_block(0),
            u: (1..=dim).map(read_block).collect(),
        })
    }

    /// Attaches the samples to `grid`, which must match the stored geometry.
    pub fn into_state(self, grid: &Arc<Grid>, path: &Path) -> Result<State> {
        let spec = grid.spec();
        if spec.dim != self.dim || spec.n != self.n || spec.box_length.to_bits() != self.box_length.to_bits() {
            return Err(Error::GridMismatch(format!(
                "snapshot {} holds dim = {}, n = {}, L = {}; the run expects dim = {}, n = {}, L = {}",
                path.display(),
                self.dim,
                self.n,
                self.box_length,
                spec.dim,
                spec.n,
                spec.box_length
            )));
        }
        let phi = ScalarField::from_values(grid, self.phi);
        let u = VectorField::new(self.u.into_iter().map(|c| ScalarField::from_values(grid, c)).collect())?;
        State::new(u, phi, self.t)
    }
}

pub fn write_snapshot(state: &State, path: &Path) -> Result<()> {
    std::fs::write(path, Snapshot::of(state).to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Snapshot::from_bytes(&bytes, path)
}

/// Reads a snapshot and attaches it to `grid`.
pub fn load_state(path: &Path, grid: &Arc<Grid>) -> Result<State> {
    read_snapshot(path)?.into_state(grid, path)
}

/// Writes `snap_<step>.bin` into a directory at every sampled step.
#[derive(Debug)]
pub struct SnapshotSeries {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl SnapshotSeries {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SnapshotSeries {
            dir: dir.into(),
            written: Vec::new(),
        }
    }

    pub fn path_for(&self, step: usize) -> PathBuf {
        self.dir.join(format!("snap_{step:08}.bin"))
    }
}

impl Observer for SnapshotSeries {
    fn observe(&mut self, row: &LedgerRow, state: &State) -> Result<()> {
        let p = self.path_for(row.step);
        write_snapshot(state, &p)?;
        self.written.push(p);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::noise::{band_limited_scalar, band_limited_solenoidal};
    use crate::spectral::GridSpec;

    fn random_state(dim: usize) -> State {
        let g = Grid::new(GridSpec::new(dim, 8, 2.5)).unwrap();
        State::new(
            band_limited_solenoidal(&g, 0.3, 5, 2).unwrap(),
            band_limited_scalar(&g, 0.1, 0.2, 6, 3).unwrap(),
            0.125,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        for dim in [2, 3] {
            let st = random_state(dim);
            let p1 = dir.path().join("a.bin");
            let p2 = dir.path().join("b.bin");
            write_snapshot(&st, &p1).unwrap();
            let back = load_state(&p1, st.grid()).unwrap();
            assert_eq!(back.t, st.t);
            assert_eq!(back.phi.values(), st.phi.values());
            write_snapshot(&back, &p2).unwrap();
            assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        }
    }

    #[test]
    fn header_layout() {
        let st = random_state(2);
        let b = Snapshot::of(&st).to_bytes();
        assert_eq!(&b[..16], b"NSPFCSNAP\0v1\0\0\0\0");
        assert_eq!(u32::from_le_bytes(b[16..20].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(b[20..24].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(b[24..32].try_into().unwrap()), 2.5);
        assert_eq!(f64::from_le_bytes(b[32..40].try_into().unwrap()), 0.125);
        assert_eq!(b.len(), 40 + 8 * 64 * 3);
        assert_eq!(f64::from_le_bytes(b[40..48].try_into().unwrap()), st.phi.values()[0]);
    }

    #[test]
    fn truncated_file_names_lengths() {
        let b = Snapshot::of(&random_state(2)).to_bytes();
        let e = Snapshot::from_bytes(&b[..b.len() - 3], Path::new("x.bin")).unwrap_err().to_string();
        assert!(e.contains(&format!("expected {}", b.len())) && e.contains(&format!("found {}", b.len() - 3)), "{e}");
        let e = Snapshot::from_bytes(&b[..10], Path::new("x.bin")).unwrap_err().to_string();
        assert!(e.contains("truncated"), "{e}");
    }

    #[test]
    fn bad_magic_rejected() {
        let mut b = Snapshot::of(&random_state(2)).to_bytes();
        b[0] = b'X';
        let e = Snapshot::from_bytes(&b, Path::new("x.bin")).unwrap_err().to_string();
        assert!(e.contains("magic"), "{e}");
    }

    #[test]
    fn grid_mismatch_rejected() {
        let st = random_state(2);
        let other = Grid::new(GridSpec::new(2, 16, 2.5)).unwrap();
        let r = Snapshot::of(&st).into_state(&other, Path::new("x.bin"));
        assert!(matches!(r, Err(Error::GridMismatch(_))));
    }
}

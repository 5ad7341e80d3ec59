//! Ledger series as CSV.
//!
//! Columns: `step,t,kinetic,sh,visc_diss,mob_diss,residual,mass,phi_h2,phi_h3,u_h,u_v,psi_h1`.
//! Floats use the shortest representation that reads back to the same bits.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::LedgerRow;
use crate::error::{Error, Result};
use crate::integrator::Observer;
use crate::model::State;

pub const LEDGER_HEADER: [&str; 13] = [
    "step", "t", "kinetic", "sh", "visc_diss", "mob_diss", "residual", "mass", "phi_h2", "phi_h3", "u_h", "u_v",
    "psi_h1",
];

#[derive(Serialize)]
struct FlatRow {
    step: usize,
    t: f64,
    kinetic: f64,
    sh: f64,
    visc_diss: f64,
    mob_diss: f64,
    residual: f64,
    mass: f64,
    phi_h2: f64,
    phi_h3: f64,
    u_h: f64,
    u_v: f64,
    psi_h1: f64,
}

impl From<&LedgerRow> for FlatRow {
    fn from(r: &LedgerRow) -> Self {
        FlatRow {
            step: r.step,
            t: r.t,
            kinetic: r.kinetic,
            sh: r.sh,
            visc_diss: r.visc_diss,
            mob_diss: r.mob_diss,
            residual: r.residual,
            mass: r.mass,
            phi_h2: r.norms.phi_h2,
            phi_h3: r.norms.phi_h3,
            u_h: r.norms.u_h,
            u_v: r.norms.u_v,
            psi_h1: r.norms.psi_h1,
        }
    }
}

/// Writes ledger rows to any sink; the header goes out on construction.
pub struct LedgerWriter<W: Write> {
    inner: csv::Writer<W>,
    label: PathBuf,
}

fn csv_err(label: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(label, io),
        other => Error::io(label, std::io::Error::other(format!("{other:?}"))),
    }
}

impl<W: Write> LedgerWriter<W> {
    pub fn new(sink: W, label: impl Into<PathBuf>) -> Result<Self> {
        let label = label.into();
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
        inner.write_record(LEDGER_HEADER).map_err(|e| csv_err(&label, e))?;
        Ok(LedgerWriter { inner, label })
    }

    pub fn write_row(&mut self, row: &LedgerRow) -> Result<()> {
        self.inner.serialize(FlatRow::from(row)).map_err(|e| csv_err(&self.label, e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.label, e))
    }

    pub fn into_inner(self) -> Result<W> {
        let label = self.label;
        self.inner
            .into_inner()
            .map_err(|e| Error::io(&label, std::io::Error::other(e.to_string())))
    }
}

impl LedgerWriter<File> {
    pub fn create(path: &Path) -> Result<Self> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        Self::new(f, path)
    }
}

impl<W: Write> Observer for LedgerWriter<W> {
    fn observe(&mut self, row: &LedgerRow, _state: &State) -> Result<()> {
        self.write_row(row)
    }

    fn finish(&mut self) -> Result<()> {
        self.flush()
    }
}

/// Renders rows as a CSV string.
pub fn ledger_csv(rows: &[LedgerRow]) -> Result<String> {
    let mut w = LedgerWriter::new(Vec::new(), "<memory>")?;
    for r in rows {
        w.write_row(r)?;
    }
    let bytes = w.into_inner()?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

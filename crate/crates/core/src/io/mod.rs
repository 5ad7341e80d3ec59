//! Configuration, snapshots, CSV series and seeded initial data.

pub mod config;
pub mod csv;
pub mod noise;
pub mod snapshot;

pub use config::{load_config, parse_config, RunConfig};
pub use csv::{ledger_csv, LedgerWriter};
pub use snapshot::{load_state, read_snapshot, write_snapshot, Snapshot, SnapshotSeries};

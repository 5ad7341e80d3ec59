//! Measured counterparts of the energy law, continuous dependence and regularity classes.

mod contdep;
mod ledger;
mod norms;
mod poincare;

pub use contdep::{cont_dep_experiment, gap_norms, ContDepReport, GapSample};
pub use ledger::{ledger_update, trapezoid, EnergySample, LedgerAccumulator, LedgerRow};
pub use norms::{full_norm, norm_monitor, seminorm, vector_seminorm, NormMonitor};
pub use poincare::{poincare_checks, PoincareReport};

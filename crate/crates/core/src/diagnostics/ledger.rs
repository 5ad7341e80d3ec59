use serde::Serialize;

use super::norms::{norm_monitor, NormMonitor};
use crate::model::{dissipation_rates, kinetic_energy, sh_energy, PhysParams, State};
use crate::spectral::ScalarField;

/// One sample of the energy balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerRow {
    pub step: usize,
    pub t: f64,
    pub kinetic: f64,
    pub sh: f64,
    /// Accumulated `(1/M) int eta |Du|^2` up to `t`.
    pub visc_diss: f64,
    /// Accumulated `int m |grad psi|^2` up to `t`.
    pub mob_diss: f64,
    /// `kinetic + sh + visc_diss + mob_diss - (kinetic + sh)(0)`.
    pub residual: f64,
    pub mass: f64,
    pub norms: NormMonitor,
}

impl LedgerRow {
    pub fn total(&self) -> f64 {
        self.kinetic + self.sh
    }
}

/// Instantaneous energy and dissipation rates of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    pub kinetic: f64,
    pub sh: f64,
    pub visc_rate: f64,
    pub mob_rate: f64,
    pub mass: f64,
}

impl EnergySample {
    pub fn of(state: &State, psi: &ScalarField, params: &PhysParams) -> Self {
        let (visc_rate, mob_rate) = dissipation_rates(state, psi, params);
        EnergySample {
            t: state.t,
            kinetic: kinetic_energy(&state.u, params),
            sh: sh_energy(&state.phi, params),
            visc_rate,
            mob_rate,
            mass: state.phi.mean(),
        }
    }
}

/// Trapezoidal integration of `values` sampled at `times`.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Running energy balance fed with one [`EnergySample`] per time level.
#[derive(Debug, Clone)]
pub struct LedgerAccumulator {
    initial: Option<f64>,
    last: Option<EnergySample>,
    visc: f64,
    mob: f64,
}

impl Default for LedgerAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl LedgerAccumulator {
    pub fn new() -> Self {
        LedgerAccumulator {
            initial: None,
            last: None,
            visc: 0.0,
            mob: 0.0,
        }
    }

    /// Adds the sample and returns the ledger row at its time.
    pub fn push(&mut self, step: usize, s: EnergySample, norms: NormMonitor) -> LedgerRow {
        if let Some(prev) = self.last {
            let h = s.t - prev.t;
            self.visc += 0.5 * h * (prev.visc_rate + s.visc_rate);
            self.mob += 0.5 * h * (prev.mob_rate + s.mob_rate);
        }
        let e0 = *self.initial.get_or_insert(s.kinetic + s.sh);
        self.last = Some(s);
        LedgerRow {
            step,
            t: s.t,
            kinetic: s.kinetic,
            sh: s.sh,
            visc_diss: self.visc,
            mob_diss: self.mob,
            residual: s.kinetic + s.sh + self.visc + self.mob - e0,
            mass: s.mass,
            norms,
        }
    }

    pub fn initial_energy(&self) -> Option<f64> {
        self.initial
    }
}

/// Samples `state` and appends it to `acc`.
pub fn ledger_update(
    acc: &mut LedgerAccumulator,
    step: usize,
    state: &State,
    psi: &ScalarField,
    params: &PhysParams,
) -> LedgerRow {
    let s = EnergySample::of(state, psi, params);
    acc.push(step, s, norm_monitor(&state.u, &state.phi, psi))
}

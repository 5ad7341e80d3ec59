//! First-order stabilized IMEX time stepping.
//!
//! Every tendency is evaluated explicitly at the old level and a diagonal implicit
//! shift is added on the increment:
//!
//! ```text
//! (1 + dt A) (phi' - phi) = dt R_phi(phi, u),   A = m_bar |k|^2 (|k|^4 + S)
//! (1 + dt B) (u'   - u  ) = dt R_u(phi, u),     B = eta_bar |k|^2 / 2 + kappa
//! ```
//!
//! `m_bar` and `eta_bar` are the largest coefficient values over the current range of
//! `phi`, so the implicit operator dominates the stiff part of the explicit one.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{ledger_update, EnergySample, LedgerAccumulator, LedgerRow};
use crate::error::{Error, Result};
use crate::model::{chemical_potential, rhs_phi_coeffs, rhs_u_coeffs, PhysParams, State};
use crate::par;
use crate::spectral::{leray_coeffs, Complex64, ScalarField, VectorField};

fn default_s() -> f64 {
    2.0
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub dt: f64,
    #[serde(default = "default_s", alias = "stabilization_S")]
    pub stabilization_s: f64,
    #[serde(default)]
    pub stabilization_kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    pub t_end: f64,
}

impl StepConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        StepConfig {
            dt,
            stabilization_s: default_s(),
            stabilization_kappa: 0.0,
            max_steps: None,
            t_end,
        }
    }

    pub fn with_steps(dt: f64, steps: usize) -> Self {
        StepConfig {
            max_steps: Some(steps),
            ..Self::new(dt, dt * steps as f64)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("step.dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("step.t_end must be >= 0, got {}", self.t_end)));
        }
        if !(self.stabilization_s.is_finite() && self.stabilization_s >= 0.0) {
            return Err(Error::Config(format!(
                "step.stabilization_s must be >= 0, got {}",
                self.stabilization_s
            )));
        }
        if !(self.stabilization_kappa.is_finite() && self.stabilization_kappa >= 0.0) {
            return Err(Error::Config(format!(
                "step.stabilization_kappa must be >= 0, got {}",
                self.stabilization_kappa
            )));
        }
        Ok(())
    }

    /// Number of steps needed to go from `t0` to `t_end`, capped by `max_steps`.
    pub fn step_count(&self, t0: f64) -> usize {
        let span = self.t_end - t0;
        let n = if span <= 0.0 {
            0
        } else {
            (span / self.dt - 1e-9).ceil().max(0.0) as usize
        };
        self.max_steps.map_or(n, |m| n.min(m))
    }
}

fn phi_range(phi: &ScalarField) -> (f64, f64) {
    let v = phi.values();
    (par::min(v.len(), |i| v[i]), par::max(v.len(), |i| v[i]))
}

fn all_finite(v: &[f64]) -> bool {
    par::max(v.len(), |i| if v[i].is_finite() { 0.0 } else { 1.0 }) == 0.0
}

/// One step from `state`, whose chemical potential `psi` the caller already holds.
pub(crate) fn advance(
    state: &State,
    psi: &ScalarField,
    params: &PhysParams,
    cfg: &StepConfig,
    step: usize,
    t_new: f64,
) -> Result<State> {
    let grid = state.grid();
    let t = grid.tables();
    let dt = cfg.dt;
    let (lo, hi) = phi_range(&state.phi);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::BlowUp { step, t: t_new });
    }

    let m_bar = params.mobility.range_over(lo, hi).1;
    let s = cfg.stabilization_s;
    let r = rhs_phi_coeffs(state, psi, params);
    let pc = state.phi.coeffs();
    let phi_c = par::collect(grid.len(), |i| {
        if !t.mask[i] {
            return Complex64::default();
        }
        let a = dt * m_bar * t.ksq[i] * (t.k4[i] + s);
        pc[i] + dt * r[i] / (1.0 + a)
    });
    let phi = ScalarField::from_coeffs(grid, phi_c);

    let u = if params.hydrodynamics {
        let eta_bar = params.eta.range_over(lo, hi).1;
        let kappa = cfg.stabilization_kappa;
        let ru = rhs_u_coeffs(state, psi, params);
        let mut comps: Vec<Vec<Complex64>> = (0..grid.dim())
            .map(|c| {
                let uc = state.u.comp(c).coeffs();
                let rc = &ru[c];
                par::collect(grid.len(), |i| {
                    if !t.mask[i] {
                        return Complex64::default();
                    }
                    let b = dt * (0.5 * eta_bar * t.ksq[i] + kappa);
                    uc[i] + dt * rc[i] / (1.0 + b)
                })
            })
            .collect();
        leray_coeffs(grid, &mut comps);
        VectorField::from_coeffs(grid, comps)
    } else {
        state.u.clone()
    };

    let finite = all_finite(phi.values()) && u.comps().iter().all(|c| all_finite(c.values()));
    if !finite {
        return Err(Error::BlowUp { step, t: t_new });
    }
    Ok(State { u, phi, t: t_new })
}

/// Advances `state` by one step of `cfg.dt`.
pub fn step_imex(state: &State, params: &PhysParams, cfg: &StepConfig) -> Result<State> {
    let psi = chemical_potential(&state.phi, params);
    let step = (state.t / cfg.dt).round().max(0.0) as usize + 1;
    advance(state, &psi, params, cfg, step, state.t + cfg.dt)
}

/// Receives every sampled ledger row together with the state it describes.
pub trait Observer {
    fn observe(&mut self, row: &LedgerRow, state: &State) -> Result<()>;

    /// Called once after the last step, or after a failure.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

/// Collects states at each sample; handy in tests.
#[derive(Debug, Default)]
pub struct StateCollector {
    pub states: Vec<State>,
}

impl Observer for StateCollector {
    fn observe(&mut self, _row: &LedgerRow, state: &State) -> Result<()> {
        self.states.push(state.clone());
        Ok(())
    }
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub final_state: State,
    pub ledger: Vec<LedgerRow>,
    pub steps: usize,
}

/// Steps `initial` until `cfg.t_end` (or `cfg.max_steps`), sampling the ledger every
/// `stride` steps and at the final step.
///
/// Dissipation integrals are accumulated with the trapezoidal rule over every step,
/// independently of the stride. With zero steps the ledger is empty.
pub fn run(
    initial: State,
    params: &PhysParams,
    cfg: &StepConfig,
    stride: usize,
    observers: &mut [&mut dyn Observer],
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let stride = stride.max(1);
    let steps = cfg.step_count(initial.t);
    let t0 = initial.t;
    let mut ledger = Vec::new();
    let mut acc = LedgerAccumulator::new();
    let mut state = initial;

    let result = (|| -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        let mut psi = chemical_potential(&state.phi, params);
        for step in 0..=steps {
            if step == 0 || step % stride == 0 || step == steps {
                let row = ledger_update(&mut acc, step, &state, &psi, params);
                for o in observers.iter_mut() {
                    o.observe(&row, &state)?;
                }
                ledger.push(row);
            } else {
                acc.push(step, EnergySample::of(&state, &psi, params), Default::default());
            }
            if step == steps {
                break;
            }
            let t_new = t0 + (step + 1) as f64 * cfg.dt;
            state = advance(&state, &psi, params, cfg, step + 1, t_new)?;
            psi = chemical_potential(&state.phi, params);
        }
        Ok(())
    })();

    let mut finish_err = None;
    for o in observers.iter_mut() {
        if let Err(e) = o.finish() {
            finish_err.get_or_insert(e);
        }
    }
    result?;
    if let Some(e) = finish_err {
        return Err(e);
    }
    Ok(TrajectoryRecord {
        final_state: state,
        ledger,
        steps,
    })
}

/// Advisory step-size bounds from the explicitly treated terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    /// `1 / (max|u| * sum_a k_max,a)`; `None` when the fluid is at rest.
    pub advective: Option<f64>,
    /// Bound from the variable-mobility part of the sixth-order term; `None` for
    /// constant mobility, where the split is exact.
    pub mobility_remainder: Option<f64>,
    /// Bound from the explicit `-2|k|^4 + f'` part not covered by the stabilization `S`.
    pub explicit_remainder: f64,
    pub suggested: f64,
}

/// Estimates a stable step for `state` from the spectral radius of the explicit terms.
pub fn stability_probe(params: &PhysParams, state: &State, cfg: &StepConfig) -> ProbeReport {
    let grid = state.grid();
    let t = grid.tables();
    let spec = grid.spec();
    let kmax = 2.0 * std::f64::consts::PI * spec.dealias_cutoff() as f64 / spec.box_length;

    let umax = if params.hydrodynamics { state.u.max_abs() } else { 0.0 };
    let advective = (umax > 0.0).then(|| 1.0 / (umax * kmax * grid.dim() as f64));

    let (lo, hi) = phi_range(&state.phi);
    let (m_lo, m_hi) = params.mobility.range_over(lo, hi);
    let ksq_max = par::max(grid.len(), |i| if t.mask[i] { t.ksq[i] } else { 0.0 });
    let mobility_remainder = (!params.mobility.is_constant() && m_hi > m_lo)
        .then(|| 1.0 / ((m_hi - m_lo) * ksq_max.powi(3)));

    let s_ext = lo.abs().max(hi.abs());
    let fp = params.bulk.f_prime(s_ext, params.r).max(params.bulk.f_prime(0.0, params.r));
    let radius = par::max(grid.len(), |i| {
        if !t.mask[i] {
            return 0.0;
        }
        let q = t.ksq[i];
        m_hi * q * (-2.0 * q + fp - cfg.stabilization_s).abs()
    });
    let explicit_remainder = if radius > 0.0 { 1.0 / radius } else { f64::MAX };

    let suggested = [advective, mobility_remainder]
        .into_iter()
        .flatten()
        .fold(explicit_remainder, f64::min);
    ProbeReport {
        advective,
        mobility_remainder,
        explicit_remainder,
        suggested,
    }
}

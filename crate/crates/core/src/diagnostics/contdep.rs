use serde::Serialize;

use super::ledger::trapezoid;
use super::norms::{full_norm, vector_seminorm};
use crate::error::{Error, Result};
use crate::integrator::{step_imex, StepConfig};
use crate::model::{PhysParams, State};
use crate::spectral::{ScalarField, VectorField};

/// Squared distances between two states at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSample {
    pub t: f64,
    /// `||du||^2`
    pub u_h: f64,
    /// `||grad du||^2`
    pub u_v: f64,
    /// `||dphi||_{H^2}^2`
    pub phi_h2: f64,
    /// `||dphi||_{H^5}^2`
    pub phi_h5: f64,
}

/// Gap norms between two states on the same grid.
pub fn gap_norms(a: &State, b: &State) -> Result<GapSample> {
    a.phi.ensure_same_grid(&b.phi)?;
    let du = a.u.axpy(-1.0, &b.u);
    let dphi = a.phi.axpy(-1.0, &b.phi);
    Ok(GapSample {
        t: a.t,
        u_h: vector_seminorm(&du, 0).powi(2),
        u_v: vector_seminorm(&du, 1).powi(2),
        phi_h2: full_norm(&dphi, 2).powi(2),
        phi_h5: full_norm(&dphi, 5).powi(2),
    })
}

/// Outcome of a continuous-dependence experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContDepReport {
    pub delta: f64,
    /// `||du_0||^2 + ||dphi_0||_{H^2}^2`
    pub input_gap: f64,
    /// `sup ||du||^2 + int ||grad du||^2 + sup ||dphi||_{H^2}^2 + int ||dphi||_{H^5}^2`
    pub output_gap: f64,
    pub sup_u_h: f64,
    pub int_u_v: f64,
    pub sup_phi_h2: f64,
    pub int_phi_h5: f64,
    /// `output_gap / input_gap`; `None` when the input gap vanishes.
    pub ratio: Option<f64>,
    pub series: Vec<GapSample>,
}

impl ContDepReport {
    pub fn is_degenerate(&self) -> bool {
        self.ratio.is_none()
    }
}

/// Runs `base` and `base + delta * (du, dphi)` side by side with `cfg` and measures how
/// far apart they drift.
///
/// `du` must be divergence-free and mean-free. Time integrals use the trapezoidal rule
/// over every step.
pub fn cont_dep_experiment(
    base: &State,
    params: &PhysParams,
    cfg: &StepConfig,
    du: &VectorField,
    dphi: &ScalarField,
    delta: f64,
) -> Result<ContDepReport> {
    cfg.validate()?;
    if base.grid().dim() != 2 {
        return Err(Error::Config(format!(
            "continuous dependence is only established in 2D, got a {}D grid",
            base.grid().dim()
        )));
    }
    if !delta.is_finite() {
        return Err(Error::Config(format!("delta must be finite, got {delta}")));
    }
    let mut a = base.clone();
    let mut b = State::new(base.u.axpy(delta, du), base.phi.axpy(delta, dphi), base.t)?;
    let steps = cfg.step_count(base.t);

    let mut series = vec![gap_norms(&a, &b)?];
    for _ in 0..steps {
        a = step_imex(&a, params, cfg)?;
        b = step_imex(&b, params, cfg)?;
        series.push(gap_norms(&a, &b)?);
    }

    let times: Vec<f64> = series.iter().map(|s| s.t).collect();
    let sup = |f: fn(&GapSample) -> f64| series.iter().map(f).fold(0.0, f64::max);
    let int = |f: fn(&GapSample) -> f64| trapezoid(&times, &series.iter().map(f).collect::<Vec<_>>());
    let sup_u_h = sup(|s| s.u_h);
    let int_u_v = int(|s| s.u_v);
    let sup_phi_h2 = sup(|s| s.phi_h2);
    let int_phi_h5 = int(|s| s.phi_h5);
    let input_gap = series[0].u_h + series[0].phi_h2;
    let output_gap = sup_u_h + int_u_v + sup_phi_h2 + int_phi_h5;
    let ratio = (input_gap > 0.0).then(|| output_gap / input_gap);
    Ok(ContDepReport {
        delta,
        input_gap,
        output_gap,
        sup_u_h,
        int_u_v,
        sup_phi_h2,
        int_phi_h5,
        ratio,
        series,
    })
}

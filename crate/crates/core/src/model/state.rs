use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{leray_project, max_divergence, Grid, ScalarField, VectorField};

/// Velocity, phase field and time: the unit of evolution.
#[derive(Debug, Clone)]
pub struct State {
    pub u: VectorField,
    pub phi: ScalarField,
    pub t: f64,
}

impl State {
    pub fn new(u: VectorField, phi: ScalarField, t: f64) -> Result<Self> {
        u.ensure_same_grid(&phi)?;
        Ok(State { u, phi, t })
    }

    /// Builds a state after projecting `u` onto divergence-free, zero-mean fields.
    pub fn projected(u: VectorField, phi: ScalarField, t: f64) -> Result<Self> {
        Self::new(leray_project(&u), phi, t)
    }

    /// Quiescent state with uniform phase field `c`.
    pub fn uniform(grid: &Arc<Grid>, c: f64) -> Self {
        State {
            u: VectorField::zeros(grid),
            phi: ScalarField::constant(grid, c),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.phi.grid()
    }

    pub fn max_divergence(&self) -> f64 {
        max_divergence(&self.u)
    }

    pub fn max_velocity_mean(&self) -> f64 {
        self.u.means().iter().fold(0.0, |a, m| a.max(m.abs()))
    }

    /// Checks the divergence-free and zero-mean invariants at the given tolerances.
    pub fn check_invariants(&self, div_tol: f64, mean_tol: f64) -> Result<()> {
        let div = self.max_divergence();
        if div > div_tol {
            return Err(Error::Config(format!(
                "velocity divergence {div:e} exceeds {div_tol:e}"
            )));
        }
        let mean = self.max_velocity_mean();
        if mean > mean_tol {
            return Err(Error::Config(format!(
                "velocity mean {mean:e} exceeds {mean_tol:e}"
            )));
        }
        Ok(())
    }
}

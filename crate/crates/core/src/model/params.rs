use serde::{Deserialize, Serialize};

use super::coeff::{validate_a1, CoefficientFamily};
use crate::error::{Error, Result};

/// Bulk nonlinearity `f` in the chemical potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bulk {
    /// `f(s) = s^3 + (r + 1) s`.
    #[default]
    Cubic,
    /// `f = 0`: only the linear sixth-order part remains (verification subcase).
    Off,
}

impl Bulk {
    #[inline]
    pub fn f(self, s: f64, r: f64) -> f64 {
        match self {
            Bulk::Cubic => s * s * s + (r + 1.0) * s,
            Bulk::Off => 0.0,
        }
    }

    #[inline]
    pub fn f_prime(self, s: f64, r: f64) -> f64 {
        match self {
            Bulk::Cubic => 3.0 * s * s + r + 1.0,
            Bulk::Off => 0.0,
        }
    }

    /// Primitive `F` with `F(0) = 0`.
    #[inline]
    pub fn primitive(self, s: f64, r: f64) -> f64 {
        match self {
            Bulk::Cubic => potential_f(s, r),
            Bulk::Off => 0.0,
        }
    }
}

/// `F(s) = s^4 / 4 + (r + 1) s^2 / 2`, the primitive of the cubic `f`.
pub fn potential_f(s: f64, r: f64) -> f64 {
    let s2 = s * s;
    0.25 * s2 * s2 + 0.5 * (r + 1.0) * s2
}

fn default_coupling() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

/// Physical parameters of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    /// Korteweg coupling constant `M > 0`.
    #[serde(default = "default_coupling", alias = "M")]
    pub coupling: f64,
    pub r: f64,
    #[serde(default)]
    pub eta: CoefficientFamily,
    #[serde(default)]
    pub mobility: CoefficientFamily,
    #[serde(default)]
    pub bulk: Bulk,
    /// When `false` the velocity is held at zero and the phase field evolves as a
    /// pure conserved gradient flow.
    #[serde(default = "default_true")]
    pub hydrodynamics: bool,
}

impl PhysParams {
    pub fn new(coupling: f64, r: f64, eta: CoefficientFamily, mobility: CoefficientFamily) -> Self {
        PhysParams {
            coupling,
            r,
            eta,
            mobility,
            bulk: Bulk::Cubic,
            hydrodynamics: true,
        }
    }

    pub fn with_bulk(mut self, bulk: Bulk) -> Self {
        self.bulk = bulk;
        self
    }

    pub fn without_flow(mut self) -> Self {
        self.hydrodynamics = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return Err(Error::Config(format!(
                "params.coupling (M) must be > 0, got {}",
                self.coupling
            )));
        }
        if !self.r.is_finite() {
            return Err(Error::Config(format!("params.r must be finite, got {}", self.r)));
        }
        validate_a1(&self.eta, 1000).map_err(|e| prefix(e, "params.eta"))?;
        validate_a1(&self.mobility, 1000).map_err(|e| prefix(e, "params.mobility"))?;
        Ok(())
    }

    #[inline]
    pub fn f(&self, s: f64) -> f64 {
        self.bulk.f(s, self.r)
    }
}

fn prefix(e: Error, field: &str) -> Error {
    match e {
        Error::A1(m) => Error::A1(format!("{field}: {m}")),
        Error::Config(m) => Error::Config(format!("{field}: {m}")),
        other => other,
    }
}

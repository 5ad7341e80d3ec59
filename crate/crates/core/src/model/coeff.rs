use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A state-dependent transport coefficient `s -> c(s)` (viscosity or mobility).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientFamily {
    Constant {
        value: f64,
    },
    /// `lower + (upper - lower) * (1 + tanh s) / 2`, increasing with slope at most
    /// `(upper - lower) / 2`, which must not exceed `slope_cap`.
    SmoothMonotone {
        lower: f64,
        upper: f64,
        slope_cap: f64,
    },
}

impl Default for CoefficientFamily {
    fn default() -> Self {
        CoefficientFamily::Constant { value: 1.0 }
    }
}

impl CoefficientFamily {
    pub fn constant(value: f64) -> Self {
        CoefficientFamily::Constant { value }
    }

    /// Smooth family with the tightest admissible slope cap.
    pub fn smooth(lower: f64, upper: f64) -> Self {
        CoefficientFamily::SmoothMonotone {
            lower,
            upper,
            slope_cap: (upper - lower) / 2.0,
        }
    }

    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            CoefficientFamily::Constant { value } => value,
            CoefficientFamily::SmoothMonotone { .. } => self.value_with_tanh(s.tanh()),
        }
    }

    /// Same as [`value`](Self::value) with `tanh(s)` supplied by the caller, so that
    /// several families can share one evaluation.
    #[inline]
    pub fn value_with_tanh(&self, tanh_s: f64) -> f64 {
        match *self {
            CoefficientFamily::Constant { value } => value,
            CoefficientFamily::SmoothMonotone { lower, upper, .. } => {
                lower + (upper - lower) * 0.5 * (1.0 + tanh_s)
            }
        }
    }

    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            CoefficientFamily::Constant { .. } => 0.0,
            CoefficientFamily::SmoothMonotone { lower, upper, .. } => {
                let t = s.tanh();
                0.5 * (upper - lower) * (1.0 - t * t)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientFamily::Constant { .. })
    }

    /// Declared `(lower, upper)` bounds.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            CoefficientFamily::Constant { value } => (value, value),
            CoefficientFamily::SmoothMonotone { lower, upper, .. } => (lower, upper),
        }
    }

    /// Range of the coefficient over `[lo, hi]`; exact because every family is monotone.
    pub fn range_over(&self, lo: f64, hi: f64) -> (f64, f64) {
        (self.value(lo), self.value(hi))
    }
}

/// Observed extrema from [`validate_a1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Report {
    pub min_value: f64,
    pub max_value: f64,
    pub min_derivative: f64,
    pub max_derivative: f64,
    /// `false` for constant families, whose derivative is identically zero.
    pub monotonicity_enforced: bool,
}

/// Samples `fam` and a centered difference of it on `[-10, 10]` and checks the declared bounds.
///
/// Constant families are admitted with derivative zero; strict monotonicity is only
/// demanded of the smooth kind.
pub fn validate_a1(fam: &CoefficientFamily, sample_count: usize) -> Result<A1Report> {
    if sample_count < 100 {
        return Err(Error::Config(format!(
            "A1 validation needs at least 100 samples, got {sample_count}"
        )));
    }
    let (lower, upper, cap) = match *fam {
        CoefficientFamily::Constant { value } => {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::A1(format!(
                    "constant coefficient must be positive and finite, got {value}"
                )));
            }
            (value, value, 0.0)
        }
        CoefficientFamily::SmoothMonotone {
            lower,
            upper,
            slope_cap,
        } => {
            if !(lower.is_finite() && lower > 0.0) {
                return Err(Error::A1(format!("lower bound must be > 0, got {lower}")));
            }
            if !(upper.is_finite() && upper > lower) {
                return Err(Error::A1(format!(
                    "upper bound must exceed lower bound {lower}, got {upper}"
                )));
            }
            if !(slope_cap.is_finite() && slope_cap > 0.0) {
                return Err(Error::A1(format!("slope cap must be > 0, got {slope_cap}")));
            }
            (lower, upper, slope_cap)
        }
    };

    let h = 1e-3;
    let tol = 1e-12 * upper.abs().max(1.0);
    let mut report = A1Report {
        min_value: f64::INFINITY,
        max_value: f64::NEG_INFINITY,
        min_derivative: f64::INFINITY,
        max_derivative: f64::NEG_INFINITY,
        monotonicity_enforced: !fam.is_constant(),
    };
    for i in 0..sample_count {
        let s = -10.0 + 20.0 * i as f64 / (sample_count - 1) as f64;
        let v = fam.value(s);
        let d = (fam.value(s + h) - fam.value(s - h)) / (2.0 * h);
        report.min_value = report.min_value.min(v);
        report.max_value = report.max_value.max(v);
        report.min_derivative = report.min_derivative.min(d);
        report.max_derivative = report.max_derivative.max(d);
        if v < lower - tol {
            return Err(Error::A1(format!("value {v} at s = {s} below lower bound {lower}")));
        }
        if v > upper + tol {
            return Err(Error::A1(format!("value {v} at s = {s} above upper bound {upper}")));
        }
        if report.monotonicity_enforced {
            if d <= 0.0 {
                return Err(Error::A1(format!(
                    "derivative {d} at s = {s} is not positive"
                )));
            }
            // the difference quotient overshoots the slope by O(h^2)
            if d > cap * (1.0 + h * h) {
                return Err(Error::A1(format!(
                    "derivative {d} at s = {s} exceeds slope cap {cap}"
                )));
            }
        }
    }
    Ok(report)
}

use std::f64::consts::PI;

use crate::spectral::{spectral_weighted_sq, ScalarField};

/// One inequality `lhs <= rhs` evaluated on one field.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareCheck {
    pub name: String,
    pub field: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl PoincareCheck {
    /// Relative slack `(rhs - lhs) / rhs`; zero when both sides vanish.
    pub fn margin(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            (self.rhs - self.lhs) / self.rhs
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-300
    }
}

#[derive(Debug, Clone, Default)]
pub struct PoincareReport {
    pub checks: Vec<PoincareCheck>,
}

impl PoincareReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(PoincareCheck::holds)
    }

    pub fn min_margin(&self) -> f64 {
        self.checks
            .iter()
            .map(PoincareCheck::margin)
            .fold(f64::INFINITY, f64::min)
    }
}

fn poly(q: f64, lo: u32, hi: u32) -> f64 {
    (lo..=hi).map(|j| q.powi(j as i32)).sum()
}

/// Evaluates the Poincare-type inequalities on each field with the sharp torus constants,
/// which are attained by the lowest shell `|k| = 2 pi / L`:
///
/// * `||w - <w>|| <= (L / 2 pi) |w|_1`
/// * `||w - <w>||_{Phi_1} <= c ||grad w||`, `c^2 = 1 + (L / 2 pi)^2`
/// * `||w - <w>||_{Phi_{s+2}} <= c_s ||Delta w||_{Phi_s}` for `s = 0..=s_max`
/// * `||grad w||_{Phi_1} <= c ||Delta w||`, `c^2 = 1 + (L / 2 pi)^2`
pub fn poincare_checks(fields: &[ScalarField], s_max: u32) -> PoincareReport {
    let mut checks = Vec::new();
    for (idx, w) in fields.iter().enumerate() {
        let grid = w.grid();
        let ksq = &grid.tables().ksq;
        let k1sq = (2.0 * PI / grid.spec().box_length).powi(2);
        let c = w.coeffs();
        let weighted = |f: &(dyn Fn(f64) -> f64 + Sync)| -> f64 {
            spectral_weighted_sq(grid, c, |i| if i == 0 { 0.0 } else { f(ksq[i]) }).sqrt()
        };
        let mut push = |name: String, lhs: f64, rhs: f64| {
            checks.push(PoincareCheck { name, field: idx, lhs, rhs })
        };

        let grad = weighted(&|q| q);
        push("l2".into(), weighted(&|_| 1.0), grad / k1sq.sqrt());
        let c1 = (1.0 + 1.0 / k1sq).sqrt();
        push("phi1".into(), weighted(&|q| 1.0 + q), c1 * grad);
        for s in 0..=s_max {
            let cs = (poly(k1sq, 0, s + 2) / poly(k1sq, 2, s + 2)).sqrt();
            let lhs = weighted(&|q| poly(q, 0, s + 2));
            let rhs = cs * weighted(&|q| poly(q, 2, s + 2));
            push(format!("phi{}", s + 2), lhs, rhs);
        }
        push("grad_phi1".into(), weighted(&|q| q + q * q), c1 * weighted(&|q| q * q));
    }
    PoincareReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::noise::band_limited_scalar;
    use crate::spectral::{Grid, GridSpec};

    #[test]
    fn lowest_mode_attains_equality() {
        let g = Grid::new(GridSpec::new(2, 16, 1.0)).unwrap();
        let w = ScalarField::from_fn(&g, |x| 0.3 + (2.0 * PI * x[1]).sin());
        let r = poincare_checks(&[w], 2);
        for c in &r.checks {
            assert!(c.margin().abs() < 1e-12, "{} {}", c.name, c.margin());
        }
    }

    #[test]
    fn constant_field_gives_zero_sides() {
        let g = Grid::new(GridSpec::new(3, 8, 2.0)).unwrap();
        let r = poincare_checks(&[ScalarField::constant(&g, 4.0)], 1);
        assert!(r.all_hold());
        assert!(r.checks.iter().all(|c| c.lhs == 0.0 && c.rhs == 0.0));
    }

    #[test]
    fn random_fields_satisfy_all_inequalities() {
        let g = Grid::new(GridSpec::new(2, 32, 3.0)).unwrap();
        let fields: Vec<ScalarField> = (0..100)
            .map(|s| band_limited_scalar(&g, 0.5, 1.0, s, 10).unwrap())
            .collect();
        let r = poincare_checks(&fields, 3);
        assert!(r.all_hold());
        assert!(r.min_margin() > 0.0);
    }
}

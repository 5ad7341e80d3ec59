use serde::Serialize;

use crate::spectral::{spectral_weighted_sq, ScalarField, VectorField};

/// `|w|_s = || |k|^s w ||`, the order-`s` spectral seminorm.
pub fn seminorm(w: &ScalarField, s: u32) -> f64 {
    seminorm_sq(w, s).sqrt()
}

fn seminorm_sq(w: &ScalarField, s: u32) -> f64 {
    let ksq = &w.grid().tables().ksq;
    spectral_weighted_sq(w.grid(), w.coeffs(), |i| ksq[i].powi(s as i32))
}

/// Full norm `sqrt(sum_{j <= s} |w|_j^2)`, including the mean.
pub fn full_norm(w: &ScalarField, s: u32) -> f64 {
    let ksq = &w.grid().tables().ksq;
    spectral_weighted_sq(w.grid(), w.coeffs(), |i| {
        let q = ksq[i];
        let mut acc = 0.0;
        let mut p = 1.0;
        for _ in 0..=s {
            acc += p;
            p *= q;
        }
        acc
    })
    .sqrt()
}

/// Componentwise seminorm of a vector field.
pub fn vector_seminorm(u: &VectorField, s: u32) -> f64 {
    u.comps().iter().map(|c| seminorm_sq(c, s)).sum::<f64>().sqrt()
}

/// Higher-norm snapshot of a state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NormMonitor {
    pub phi_h2: f64,
    pub phi_h3: f64,
    /// `||u||` (the H norm).
    pub u_h: f64,
    /// `||grad u||` (the V norm).
    pub u_v: f64,
    pub psi_h1: f64,
}

pub fn norm_monitor(u: &VectorField, phi: &ScalarField, psi: &ScalarField) -> NormMonitor {
    NormMonitor {
        phi_h2: full_norm(phi, 2),
        phi_h3: full_norm(phi, 3),
        u_h: vector_seminorm(u, 0),
        u_v: vector_seminorm(u, 1),
        psi_h1: full_norm(psi, 1),
    }
}

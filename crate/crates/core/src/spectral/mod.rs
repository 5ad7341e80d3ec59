//! Periodic-box discretization: transforms, multipliers, dealiasing and the Leray projection.

mod field;
mod grid;
mod ops;

pub use field::{spectral_weighted_sq, ScalarField, VectorField};
pub use grid::{build_tables, dealias_cutoff, signed_index, wavenumbers, Grid, GridSpec, Tables};
pub use ops::{
    apply_multiplier, dealias, derivative, derivative_coeffs, divergence, divergence_coeffs,
    ensure_grids, grad_norm_sq, gradient, laplacian, leray_coeffs, leray_project, mask_coeffs,
    max_divergence, strain_norm_sq, velocity_gradient, Multiplier,
};

pub use rustfft::num_complex::Complex64;

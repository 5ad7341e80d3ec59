//! Physics of the coupled Navier-Stokes / phase-field crystal system.

mod coeff;
mod params;
mod state;
mod terms;

pub use coeff::{validate_a1, A1Report, CoefficientFamily};
pub use params::{potential_f, Bulk, PhysParams};
pub use state::State;
pub use terms::{
    bulk_energy, chemical_potential, dissipation_rates, f_eval, kinetic_energy, rhs_phi,
    rhs_phi_with_psi, rhs_u, sh_energy, skew_advection, trilinear_b0,
};

pub(crate) use terms::{rhs_phi_coeffs, rhs_u_coeffs};

#[cfg(test)]
mod tests;

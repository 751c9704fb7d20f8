//! Real-space couplings, their matrix fields over the Brillouin zone, and the
//! constraint checks, ground-state flattening and stacking that act on them.

mod couplings;
mod field;
mod ops;
mod validate;

pub use couplings::{Kind, Particle, RealSpaceCouplings, Term};
pub use field::{MatrixField, Role};
pub use ops::{
    apply_op, compose_ops, decay_profile, decay_profile_field, direct_sum, fourier,
    ground_state_covariance, inverse_fourier, offsite_mass_ratio, stack_with_ancilla,
    DecayEstimate, DEFAULT_GAP_TOL,
};
pub use validate::{
    validate, validate_boson_op, validate_boson_state, validate_fermion_op,
    validate_fermion_state, validate_hamiltonian, Check, ValidationReport, DEFAULT_TOL,
};

use crate::linalg::{eye, isy, kron, CMat};

/// The symplectic form sigma = i sigma_y (x) 1_n on the quadrature index (+..., -...).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    pub n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        SymplecticForm { n }
    }

    pub fn matrix(&self) -> CMat {
        kron(&isy(), &eye(self.n))
    }
}

/// Vacuum (correlation-free reference) fermion covariance -i sigma_y (x) 1_n.
pub fn fermion_vacuum_block(n: usize) -> CMat {
    -SymplecticForm::new(n).matrix()
}

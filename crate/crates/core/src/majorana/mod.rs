//! Dirac matrices, Majorana spinors and the algebraic facts about their
//! currents: a Majorana spinor has a null current, the current spans the
//! null space of `Ψ ↦ ÂΨ`, and a spinor with vanishing axial current is a
//! Majorana spinor up to a constant phase.

mod gamma;
mod identity;
mod nullspace;
mod phase;
mod poly;
mod spinor;

pub use gamma::{majorana_basis_change, FourVector, GammaSet, Mat4, Representation, Spinor, METRIC};
pub use identity::{anticommutator_identity, IdentityCheck, RightSide, SpinorField, VectorField};
pub use nullspace::{
    brute_force_null_rays, proportionality, slash_nullspace, slash_operator, RANK_THRESHOLD,
};
pub use phase::{phase_factorization, DEFAULT_AXIAL_TOLERANCE};
pub use poly::{Exponents, Poly};
pub use spinor::{
    axial_current, charge_conjugate, dirac_current, is_majorana, random_majorana, random_spinor,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{GammaSet, Spinor};
use super::spinor::{axial_current, charge_conjugate};
use crate::error::{Error, Result};

/// Default bound on `‖axial current‖ / ‖Ψ‖²`.
pub const DEFAULT_AXIAL_TOLERANCE: f64 = 1e-10;
/// Allowed deviation of `|⟨Ψ, Ψ_c⟩| / ‖Ψ‖²` from 1.
const OVERLAP_TOLERANCE: f64 = 1e-6;

/// Writes `Ψ = e^{iθ}Φ` with `Φ = Φ_c` and `θ ∈ [0, π)`.
///
/// Since `Ψ_c = e^{−2iθ}Ψ`, the phase comes from the overlap
/// `z = ⟨Ψ, Ψ_c⟩ / ‖Ψ‖² = e^{−2iθ}`.
pub fn phase_factorization(psi: &Spinor, g: &GammaSet, axial_tolerance: f64) -> Result<(f64, Spinor)> {
    let norm2 = psi.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::ZeroSpinor);
    }
    let axial = axial_current(psi, g).norm();
    let tolerance = axial_tolerance * norm2;
    if axial > tolerance {
        return Err(Error::AxialCurrentNonzero {
            norm: axial,
            tolerance,
        });
    }
    let z = psi.dotc(&charge_conjugate(psi, g)) / norm2;
    if (z.norm() - 1.0).abs() > OVERLAP_TOLERANCE {
        return Err(Error::DegeneratePhase { overlap: z.norm() });
    }
    let mut theta = (-0.5 * z.arg()).rem_euclid(PI);
    if theta >= PI {
        theta = 0.0;
    }
    let phi = psi * Complex64::from_polar(1.0, -theta);
    Ok((theta, phi))
}

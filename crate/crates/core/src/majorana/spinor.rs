use num_complex::Complex64;
use rand::Rng;

use super::gamma::{FourVector, GammaSet, Mat4, Spinor};

/// `Ψ_c = BΨ*`.
pub fn charge_conjugate(psi: &Spinor, g: &GammaSet) -> Spinor {
    g.conjugation * psi.conjugate()
}

/// `‖Ψ − Ψ_c‖ ≤ tol · ‖Ψ‖`.
pub fn is_majorana(psi: &Spinor, g: &GammaSet, tol: f64) -> bool {
    (psi - charge_conjugate(psi, g)).norm() <= tol * psi.norm()
}

fn bilinear(psi: &Spinor, g: &GammaSet, m: impl Fn(usize) -> Mat4) -> FourVector {
    let bar = psi.adjoint() * g.gamma[0];
    FourVector(std::array::from_fn(|mu| {
        let v = (bar * m(mu) * psi)[(0, 0)];
        debug_assert!(v.im.abs() <= 1e-10 * psi.norm_squared().max(1e-300));
        v.re
    }))
}

/// `Ψ̄γ^μΨ` (current per unit charge, contravariant).
pub fn dirac_current(psi: &Spinor, g: &GammaSet) -> FourVector {
    bilinear(psi, g, |mu| g.gamma[mu])
}

/// `Ψ̄γ⁵γ^μΨ`.
pub fn axial_current(psi: &Spinor, g: &GammaSet) -> FourVector {
    let g5 = g.gamma5();
    bilinear(psi, g, |mu| g5 * g.gamma[mu])
}

/// Spinor with independent components uniform in the unit square.
pub fn random_spinor<R: Rng + ?Sized>(rng: &mut R) -> Spinor {
    Spinor::from_fn(|_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// `½(χ + χ_c)` for a random `χ`: a Majorana spinor in the given
/// representation.
pub fn random_majorana<R: Rng + ?Sized>(rng: &mut R, g: &GammaSet) -> Spinor {
    let chi = random_spinor(rng);
    (chi + charge_conjugate(&chi, g)) * Complex64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorana::gamma::majorana_basis_change;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn real_spinor_is_self_conjugate_in_majorana_rep() {
        let g = GammaSet::majorana();
        let psi = Spinor::from_fn(|i, _| Complex64::new(i as f64 - 1.5, 0.0));
        assert_eq!(charge_conjugate(&psi, &g), psi);
    }

    #[test]
    fn conjugation_is_involutive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in [GammaSet::dirac(), GammaSet::majorana()] {
            for _ in 0..100 {
                let psi = random_spinor(&mut rng);
                let back = charge_conjugate(&charge_conjugate(&psi, &g), &g);
                assert!((back - psi).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn basis_change_maps_majorana_to_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = GammaSet::dirac();
        let u = majorana_basis_change();
        for _ in 0..20 {
            let psi = random_majorana(&mut rng, &d);
            assert!(is_majorana(&psi, &d, 1e-15));
            let m = u * psi;
            assert!(m.iter().all(|z| z.im.abs() < 1e-15));
            let back = u.adjoint() * m;
            assert!(is_majorana(&back, &d, 1e-14));
        }
    }

    #[test]
    fn zero_spinor_has_zero_currents() {
        let g = GammaSet::dirac();
        assert_eq!(dirac_current(&Spinor::zeros(), &g), FourVector::default());
        assert_eq!(axial_current(&Spinor::zeros(), &g), FourVector::default());
    }

    #[test]
    fn currents_are_representation_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (d, m) = (GammaSet::dirac(), GammaSet::majorana());
        let u = majorana_basis_change();
        let psi = random_spinor(&mut rng);
        let (jd, jm) = (dirac_current(&psi, &d), dirac_current(&(u * psi), &m));
        let (ad, am) = (axial_current(&psi, &d), axial_current(&(u * psi), &m));
        for mu in 0..4 {
            assert!((jd.0[mu] - jm.0[mu]).abs() < 1e-14);
            assert!((ad.0[mu] - am.0[mu]).abs() < 1e-14);
        }
        assert!(jd.0[0] > 0.0);
    }
}

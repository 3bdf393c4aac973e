//! `(∂̂Â + Â∂̂)Ψ = 2A^μ∂_μΨ + A_{ν,μ}γ^μγ^νΨ` for polynomial fields.
//!
//! The left side is computed by applying the operators to the fields (the
//! product `ÂΨ` is formed as a polynomial and then differentiated), the
//! right side from the expanded formula, so the two are independent.

use num_complex::Complex64;

use super::gamma::{FourVector, GammaSet, Spinor, METRIC};
use super::poly::Poly;

/// Four complex polynomial components.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField(pub [Poly; 4]);

/// Four real polynomial components (contravariant).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField(pub [Poly; 4]);

impl SpinorField {
    pub fn eval(&self, at: &[f64; 4]) -> Spinor {
        Spinor::from_fn(|a, _| self.0[a].eval(at))
    }

    fn derivative(&self, mu: usize) -> SpinorField {
        SpinorField(std::array::from_fn(|a| self.0[a].derivative(mu)))
    }
}

impl VectorField {
    pub fn eval(&self, at: &[f64; 4]) -> FourVector {
        FourVector(std::array::from_fn(|mu| self.0[mu].eval(at).re))
    }
}

/// Which right-hand side to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightSide {
    Correct,
    /// Sign of the `A_{ν,μ}γ^μγ^ν` term flipped (mutation control).
    FlippedDerivativeTerm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// `‖lhs − rhs‖`.
    pub residual: f64,
    /// `‖2A^μ∂_μΨ‖ + ‖A_{ν,μ}γ^μγ^νΨ‖`, for relative comparisons.
    pub scale: f64,
}

impl IdentityCheck {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub fn anticommutator_identity(
    psi: &SpinorField,
    a: &VectorField,
    g: &GammaSet,
    at: &[f64; 4],
    rhs: RightSide,
) -> IdentityCheck {
    // χ = ÂΨ as polynomials.
    let chi = SpinorField(std::array::from_fn(|r| {
        let mut acc = Poly::zero();
        for nu in 0..4 {
            let a_low = a.0[nu].scale(c(METRIC[nu]));
            for s in 0..4 {
                let entry = g.gamma[nu][(r, s)];
                if entry != c(0.0) {
                    acc = &acc + &(&a_low * &psi.0[s]).scale(entry);
                }
            }
        }
        acc
    }));
    let mut lhs = Spinor::zeros();
    for mu in 0..4 {
        lhs += g.gamma[mu] * chi.derivative(mu).eval(at);
    }
    let mut dirac_psi = Spinor::zeros();
    for mu in 0..4 {
        dirac_psi += g.gamma[mu] * psi.derivative(mu).eval(at);
    }
    lhs += g.slash(&a.eval(at)) * dirac_psi;

    let a_at = a.eval(at);
    let psi_at = psi.eval(at);
    let mut transport = Spinor::zeros();
    for mu in 0..4 {
        transport += psi.derivative(mu).eval(at) * c(2.0 * a_at.0[mu]);
    }
    let mut connection = Spinor::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let d = METRIC[nu] * a.0[nu].derivative(mu).eval(at).re;
            connection += g.gamma[mu] * g.gamma[nu] * psi_at * c(d);
        }
    }
    let sign = match rhs {
        RightSide::Correct => 1.0,
        RightSide::FlippedDerivativeTerm => -1.0,
    };
    let right = transport + connection * c(sign);
    IdentityCheck {
        residual: (lhs - right).norm(),
        scale: transport.norm() + connection.norm(),
    }
}

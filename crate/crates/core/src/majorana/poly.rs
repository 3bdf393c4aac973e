//! Polynomials in `(t, x, y, z)` with complex coefficients, for exact
//! derivatives in operator identities.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use rand::Rng;

pub type Exponents = [u32; 4];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Exponents, Complex64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term([0; 4], c);
        p
    }

    pub fn add_term(&mut self, e: Exponents, c: Complex64) {
        let slot = self.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.terms.remove(&e);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// All monomials of total degree `≤ degree` with coefficients drawn
    /// uniformly from the unit square (real parts only if `real`).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: u32, real: bool) -> Self {
        let mut p = Self::zero();
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    for d in 0..=degree - a - b - c {
                        let re = rng.random_range(-1.0..1.0);
                        let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
                        p.add_term([a, b, c, d], Complex64::new(re, im));
                    }
                }
            }
        }
        p
    }

    pub fn eval(&self, at: &[f64; 4]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * (0..4).map(|k| at[k].powi(e[k] as i32)).product::<f64>())
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut f = *e;
                f[var] -= 1;
                out.add_term(f, c * e[var] as f64);
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(std::array::from_fn(|k| e1[k] + e2[k]), c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn derivative_and_product() {
        // p = 3 t x² + i z
        let mut p = Poly::zero();
        p.add_term([1, 2, 0, 0], Complex64::new(3.0, 0.0));
        p.add_term([0, 0, 0, 1], Complex64::new(0.0, 1.0));
        let at = [2.0, -1.0, 0.5, 4.0];
        assert_eq!(p.eval(&at), Complex64::new(6.0, 4.0));
        assert_eq!(p.derivative(1).eval(&at), Complex64::new(-12.0, 0.0));
        assert_eq!(p.derivative(2), Poly::zero());
        let sq = &p * &p;
        assert!((sq.eval(&at) - p.eval(&at) * p.eval(&at)).norm() < 1e-12);
        assert_eq!(sq.degree(), 6);
    }

    #[test]
    fn random_cubic_has_all_monomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = Poly::random(&mut rng, 3, true);
        assert_eq!(p.terms.len(), 35);
        assert!(p.terms.values().all(|c| c.im == 0.0));
    }
}

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

pub type Mat4 = Matrix4<Complex64>;
pub type Spinor = Vector4<Complex64>;

/// Metric `diag(+, −, −, −)`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Real 4-vector with contravariant components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub fn lower(&self) -> [f64; 4] {
        std::array::from_fn(|mu| METRIC[mu] * self.0[mu])
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        (0..4).map(|mu| METRIC[mu] * self.0[mu] * other.0[mu]).sum()
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm of the components.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> FourVector {
        FourVector(self.0.map(|v| s * v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Dirac,
    Majorana,
}

/// Gamma matrices `γ^μ` with the charge-conjugation matrix `B`, where
/// `Ψ_c = BΨ*` and `Bγ^μ*B⁻¹ = −γ^μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [Mat4; 4],
    pub conjugation: Mat4,
    pub representation: Representation,
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

fn blocks(
    a: Matrix2<Complex64>,
    b: Matrix2<Complex64>,
    c: Matrix2<Complex64>,
    d: Matrix2<Complex64>,
) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
    m
}

impl GammaSet {
    /// Standard Dirac representation, `γ⁰ = diag(1, 1, −1, −1)`.
    pub fn dirac() -> Self {
        let s = pauli();
        let z = Matrix2::zeros();
        let id = Matrix2::identity();
        let gamma = [
            blocks(id, z, z, -id),
            blocks(z, s[0], -s[0], z),
            blocks(z, s[1], -s[1], z),
            blocks(z, s[2], -s[2], z),
        ];
        let u = majorana_basis_change();
        let conjugation = u.adjoint() * u.conjugate();
        Self {
            gamma,
            conjugation,
            representation: Representation::Dirac,
        }
    }

    /// A Majorana representation: every `γ^μ` is purely imaginary, so the
    /// Majorana condition is reality of the components.
    pub fn majorana() -> Self {
        let s = pauli();
        let z = Matrix2::zeros();
        let gamma = [
            blocks(z, s[1], s[1], z),
            blocks(s[2] * I, z, z, s[2] * I),
            blocks(z, -s[1], s[1], z),
            blocks(s[0] * -I, z, z, s[0] * -I),
        ];
        Self {
            gamma,
            conjugation: Mat4::identity(),
            representation: Representation::Majorana,
        }
    }

    /// `γ⁵ = iγ⁰γ¹γ²γ³`.
    pub fn gamma5(&self) -> Mat4 {
        let g = &self.gamma;
        g[0] * g[1] * g[2] * g[3] * I
    }

    /// `γ^μ a_μ` for a vector given by contravariant components.
    pub fn slash(&self, a: &FourVector) -> Mat4 {
        let low = a.lower();
        let mut m = Mat4::zeros();
        for mu in 0..4 {
            m += self.gamma[mu] * Complex64::new(low[mu], 0.0);
        }
        m
    }

    /// `max |{γ^μ, γ^ν} − 2g^{μν}|` over all entries.
    pub fn clifford_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let target = if mu == nu {
                    Mat4::identity() * Complex64::new(2.0 * METRIC[mu], 0.0)
                } else {
                    Mat4::zeros()
                };
                worst = worst.max((anti - target).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// `max |Bγ^μ*B⁻¹ + γ^μ|` and `|BB* − 1|`.
    pub fn conjugation_residual(&self) -> f64 {
        let b = &self.conjugation;
        let b_inv = b.try_inverse().expect("conjugation matrix is unitary");
        let mut worst = (b * b.conjugate() - Mat4::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        for g in &self.gamma {
            let r = b * g.conjugate() * b_inv + g;
            worst = worst.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        worst
    }
}

/// `U` with `γ_M = U γ_D U†`, mapping Dirac-representation spinors to the
/// Majorana representation.
pub fn majorana_basis_change() -> Mat4 {
    let s = pauli();
    let z = Matrix2::zeros();
    let id = Matrix2::identity();
    let g0 = blocks(id, z, z, -id);
    let g2 = blocks(z, s[1], -s[1], z);
    (g0 * (Mat4::identity() + g2)) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

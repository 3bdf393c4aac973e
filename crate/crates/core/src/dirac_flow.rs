//! Point particles in a prescribed potential obeying `A_μA^μ = m²/e²`.
//!
//! Under that constraint the momentum `p^μ = −eA^μ` is carried along by the
//! Lorentz force, so integrating the force and integrating the flow of the
//! potential must give the same world line.

use crate::error::{Error, Result};
use crate::grid::PhysicalConstants;

/// Default step for finite-difference field derivatives.
pub const FD_STEP: f64 = 1e-5;

/// A prescribed 1+1 potential. Components are contravariant `(A⁰, A¹)`.
pub trait Potential: Sync {
    fn value(&self, t: f64, x: f64) -> [f64; 2];

    /// `jac[μ][ν] = ∂_ν A^μ` with `ν = 0` for `t`, `ν = 1` for `x`.
    fn jacobian(&self, t: f64, x: f64) -> [[f64; 2]; 2] {
        fd_jacobian(self, t, x, FD_STEP).0
    }

    /// `hess[μ][ν][λ] = ∂_ν ∂_λ A^μ`.
    fn hessian(&self, t: f64, x: f64) -> [[[f64; 2]; 2]; 2] {
        let h = 1e-4;
        let mut out = [[[0.0; 2]; 2]; 2];
        for lam in 0..2 {
            let (dt, dx) = if lam == 0 { (h, 0.0) } else { (0.0, h) };
            let up = self.jacobian(t + dt, x + dx);
            let down = self.jacobian(t - dt, x - dx);
            for mu in 0..2 {
                for nu in 0..2 {
                    out[mu][nu][lam] = (up[mu][nu] - down[mu][nu]) / (2.0 * h);
                }
            }
        }
        out
    }
}

/// Central differences with one Richardson extrapolation. Also returns the
/// largest change made by the extrapolation, as an error estimate.
pub fn fd_jacobian<P: Potential + ?Sized>(p: &P, t: f64, x: f64, h: f64) -> ([[f64; 2]; 2], f64) {
    let central = |h: f64, nu: usize| -> [f64; 2] {
        let (dt, dx) = if nu == 0 { (h, 0.0) } else { (0.0, h) };
        let up = p.value(t + dt, x + dx);
        let down = p.value(t - dt, x - dx);
        [(up[0] - down[0]) / (2.0 * h), (up[1] - down[1]) / (2.0 * h)]
    };
    let mut jac = [[0.0; 2]; 2];
    let mut change = 0.0f64;
    for nu in 0..2 {
        let coarse = central(h, nu);
        let fine = central(0.5 * h, nu);
        for mu in 0..2 {
            let r = (4.0 * fine[mu] - coarse[mu]) / 3.0;
            change = change.max((r - fine[mu]).abs());
            jac[mu][nu] = r;
        }
    }
    (jac, change)
}

/// `F^{01} = ∂^0 A^1 − ∂^1 A^0 = ∂_t A¹ + ∂_x A⁰`.
pub fn field_strength(jac: &[[f64; 2]; 2]) -> f64 {
    jac[1][0] + jac[0][1]
}

/// `A_μA^μ` with metric `(+, −)`.
pub fn minkowski_square(a: [f64; 2]) -> f64 {
    a[0] * a[0] - a[1] * a[1]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformPotential(pub [f64; 2]);

impl Potential for UniformPotential {
    fn value(&self, _t: f64, _x: f64) -> [f64; 2] {
        self.0
    }
}

/// `A = −(m/e)(cosh u, sinh u)` with `u = amplitude · sin(wavenumber · x)`.
/// Satisfies the constraint identically; the overall sign gives `p⁰ = −eA⁰ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RapidityPotential {
    pub scale: f64,
    pub amplitude: f64,
    pub wavenumber: f64,
}

impl RapidityPotential {
    pub fn new(consts: &PhysicalConstants, amplitude: f64, wavenumber: f64) -> Result<Self> {
        let k = consts.constraint_constant()?.sqrt();
        Ok(Self {
            scale: -k * consts.e.signum(),
            amplitude,
            wavenumber,
        })
    }

    fn rapidity(&self, x: f64) -> f64 {
        self.amplitude * (self.wavenumber * x).sin()
    }
}

impl Potential for RapidityPotential {
    fn value(&self, _t: f64, x: f64) -> [f64; 2] {
        let u = self.rapidity(x);
        [self.scale * u.cosh(), self.scale * u.sinh()]
    }
}

/// Same profile with the spatial component flattened, so `A_μA^μ` varies in
/// space. Used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnconstrainedPotential(pub RapidityPotential);

impl Potential for UnconstrainedPotential {
    fn value(&self, t: f64, x: f64) -> [f64; 2] {
        let [a0, a1] = self.0.value(t, x);
        [a0, 0.5 * a1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelParticle {
    /// `(t, x)`.
    pub x: [f64; 2],
    /// Contravariant `(p⁰, p¹)`.
    pub p: [f64; 2],
    pub tau: f64,
}

impl RelParticle {
    /// Particle at `(t, x)` with `p = −eA`.
    pub fn on_flow<P: Potential + ?Sized>(pot: &P, consts: &PhysicalConstants, x: [f64; 2]) -> Self {
        let a = pot.value(x[0], x[1]);
        Self {
            x,
            p: [-consts.e * a[0], -consts.e * a[1]],
            tau: 0.0,
        }
    }

    pub fn mass_shell_residual(&self, consts: &PhysicalConstants) -> f64 {
        minkowski_square(self.p) - consts.m * consts.m
    }
}

type Phase = [f64; 4];

fn rk4(y: Phase, h: f64, f: impl Fn(&Phase) -> Phase) -> Phase {
    let add = |y: &Phase, k: &Phase, s: f64| -> Phase { std::array::from_fn(|i| y[i] + s * k[i]) };
    let k1 = f(&y);
    let k2 = f(&add(&y, &k1, 0.5 * h));
    let k3 = f(&add(&y, &k2, 0.5 * h));
    let k4 = f(&add(&y, &k3, h));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn check(values: &[f64], quantity: &'static str, tau: f64) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(site) => Err(Error::NonFinite {
            quantity,
            site,
            t: tau,
        }),
        None => Ok(()),
    }
}

/// One RK4 step in proper time of
/// `dx^μ/dτ = p^μ/m`, `dp^μ/dτ = (e/m) F^{μν} p_ν`.
pub fn lorentz_push<P: Potential + ?Sized>(
    particle: &RelParticle,
    pot: &P,
    consts: &PhysicalConstants,
    dtau: f64,
) -> Result<RelParticle> {
    let (e, m) = (consts.e, consts.m);
    let rate = |y: &Phase| -> Phase {
        let f01 = field_strength(&pot.jacobian(y[0], y[1]));
        // p_0 = p⁰, p_1 = −p¹, F^{10} = −F^{01}.
        [y[2] / m, y[3] / m, -(e / m) * f01 * y[3], -(e / m) * f01 * y[2]]
    };
    let y = rk4(
        [particle.x[0], particle.x[1], particle.p[0], particle.p[1]],
        dtau,
        rate,
    );
    let tau = particle.tau + dtau;
    check(&y, "particle state", tau)?;
    Ok(RelParticle {
        x: [y[0], y[1]],
        p: [y[2], y[3]],
        tau,
    })
}

/// Integral curve of `dx^μ/dτ = −eA^μ/m`; returns `n_steps + 1` points.
pub fn flow_line<P: Potential + ?Sized>(
    pot: &P,
    consts: &PhysicalConstants,
    x0: [f64; 2],
    dtau: f64,
    n_steps: usize,
) -> Result<Vec<[f64; 2]>> {
    let s = -consts.e / consts.m;
    let mut path = Vec::with_capacity(n_steps + 1);
    path.push(x0);
    let mut y: Phase = [x0[0], x0[1], 0.0, 0.0];
    for k in 0..n_steps {
        y = rk4(y, dtau, |y| {
            let a = pot.value(y[0], y[1]);
            [s * a[0], s * a[1], 0.0, 0.0]
        });
        check(&y[..2], "flow line", dtau * (k + 1) as f64)?;
        path.push([y[0], y[1]]);
    }
    Ok(path)
}

/// Pushes `n_steps` times, returning every state including the start.
pub fn push_path<P: Potential + ?Sized>(
    start: &RelParticle,
    pot: &P,
    consts: &PhysicalConstants,
    dtau: f64,
    n_steps: usize,
) -> Result<Vec<RelParticle>> {
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(*start);
    for _ in 0..n_steps {
        let next = lorentz_push(&out[out.len() - 1], pot, consts, dtau)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracResiduals {
    /// `max |A_μA^μ − m²/e²|` over the samples.
    pub constraint_max: f64,
    /// Multiplier from the time component, `(□A_0 − ∂_0 ∂_νA^ν)/A_0`.
    pub lambda: Vec<f64>,
    /// Remaining spatial component of `□A_μ − A^ν_{,νμ} − λA_μ`.
    pub field_equation_residual: Vec<f64>,
    /// `max |A_ν ∂_μ A^ν|`, the differentiated constraint.
    pub constraint_gradient_max: f64,
}

pub fn dirac_residuals<P: Potential + ?Sized>(
    pot: &P,
    consts: &PhysicalConstants,
    samples: &[[f64; 2]],
) -> Result<DiracResiduals> {
    let k2 = consts.constraint_constant()?;
    let mut out = DiracResiduals {
        constraint_max: 0.0,
        lambda: Vec::with_capacity(samples.len()),
        field_equation_residual: Vec::with_capacity(samples.len()),
        constraint_gradient_max: 0.0,
    };
    for &[t, x] in samples {
        let a = pot.value(t, x);
        let jac = pot.jacobian(t, x);
        let hess = pot.hessian(t, x);
        out.constraint_max = out.constraint_max.max((minkowski_square(a) - k2).abs());
        for mu in 0..2 {
            let g = a[0] * jac[0][mu] - a[1] * jac[1][mu];
            out.constraint_gradient_max = out.constraint_gradient_max.max(g.abs());
        }
        // μ = 0: □A_0 − ∂_0(∂_t A⁰ + ∂_x A¹) = −∂_x²A⁰ − ∂_t∂_x A¹.
        let time = -hess[0][1][1] - hess[1][0][1];
        let lambda = if a[0] != 0.0 { time / a[0] } else { 0.0 };
        // μ = 1 with A_1 = −A¹: −Ä¹ − ∂_x Ȧ⁰ + λA¹.
        let space = -hess[1][0][0] - hess[0][0][1] + lambda * a[1];
        out.lambda.push(lambda);
        out.field_equation_residual.push(space);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn uniform_potential_is_force_free() {
        let c = consts();
        let pot = UniformPotential([-1.0, 0.3]);
        let mut p = RelParticle {
            x: [0.0, 0.5],
            p: [1.2, 0.4],
            tau: 0.0,
        };
        for _ in 0..100 {
            p = lorentz_push(&p, &pot, &c, 0.01).unwrap();
        }
        assert!((p.p[0] - 1.2).abs() < 1e-12 && (p.p[1] - 0.4).abs() < 1e-12);
        assert!((p.x[0] - 1.2).abs() < 1e-12 && (p.x[1] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn rest_frame_flow_line() {
        let c = consts();
        let path = flow_line(&UniformPotential([-1.0, 0.0]), &c, [0.0, 2.0], 0.1, 10).unwrap();
        assert_eq!(path.len(), 11);
        assert!((path[10][0] - 1.0).abs() < 1e-12);
        assert_eq!(path[10][1], 2.0);
    }

    #[test]
    fn rapidity_potential_satisfies_constraint() {
        let c = PhysicalConstants::new(-0.7, 1.3).unwrap();
        let pot = RapidityPotential::new(&c, 0.3, 1.0).unwrap();
        let samples: Vec<[f64; 2]> = (0..50).map(|k| [0.0, 0.13 * k as f64]).collect();
        let r = dirac_residuals(&pot, &c, &samples).unwrap();
        assert!(r.constraint_max < 1e-12);
        assert!(r.constraint_gradient_max < 1e-9);
        assert!(r.field_equation_residual.iter().any(|v| v.abs() > 1e-3));
        let p = RelParticle::on_flow(&pot, &c, [0.0, 0.4]);
        assert!(p.p[0] > 0.0);
        assert!(p.mass_shell_residual(&c).abs() < 1e-12);
    }

    #[test]
    fn uniform_residuals_vanish() {
        let c = consts();
        let r = dirac_residuals(&UniformPotential([-1.0, 0.0]), &c, &[[0.0, 0.0], [1.0, 2.0]]).unwrap();
        assert_eq!(r.constraint_max, 0.0);
        assert!(r.lambda.iter().all(|&l| l == 0.0));
        assert!(r.field_equation_residual.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn richardson_jacobian_is_accurate() {
        let c = consts();
        let pot = RapidityPotential::new(&c, 0.3, 1.0).unwrap();
        let x: f64 = 0.8;
        let u = 0.3 * x.sin();
        let du = 0.3 * x.cos();
        let (jac, change) = fd_jacobian(&pot, 0.0, x, FD_STEP);
        assert!((jac[0][1] + u.sinh() * du).abs() < 1e-10);
        assert!((jac[1][1] + u.cosh() * du).abs() < 1e-10);
        assert_eq!(jac[0][0], 0.0);
        assert!(change < 1e-9);
    }

    #[test]
    fn push_follows_flow_for_short_times() {
        let c = consts();
        let pot = RapidityPotential::new(&c, 0.3, 1.0).unwrap();
        let start = RelParticle::on_flow(&pot, &c, [0.0, 0.2]);
        let pushed = push_path(&start, &pot, &c, 1e-2, 200).unwrap();
        let flowed = flow_line(&pot, &c, start.x, 1e-2, 200).unwrap();
        for (p, f) in pushed.iter().zip(&flowed) {
            assert!((p.x[0] - f[0]).abs() < 1e-8 && (p.x[1] - f[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn non_finite_aborts() {
        struct Blowup;
        impl Potential for Blowup {
            fn value(&self, _t: f64, x: f64) -> [f64; 2] {
                [f64::NAN * x, 0.0]
            }
        }
        assert!(matches!(
            flow_line(&Blowup, &consts(), [0.0, 1.0], 0.1, 3),
            Err(Error::NonFinite { .. })
        ));
    }
}

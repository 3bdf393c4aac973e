//! Evolution of the potential alone. The matter field is rebuilt at every
//! stage from the Gauss law and current conservation, so a slice of
//! `(B, Ḃ)` is complete Cauchy data.
//!
//! With `N = −∂_x(∂_xB⁰ + Ḃ¹)` (the time component of the Maxwell operator,
//! which has no `B̈`):
//!
//! ```text
//! φ² = (N − ρ_bg) / (−2e²B⁰)
//! φ̇  = −[Ḃ⁰φ² + ∂_x(B¹φ²)] / (2B⁰φ)
//! ```
//!
//! The second line is current conservation `∂_t(B⁰φ²) + ∂_x(B¹φ²) = 0`
//! solved for `φ̇`. Differentiating it once more in time yields `B̈⁰`.

use crate::error::{Error, Result};
use crate::grid::{central_diff, max_abs, min_abs, Field, GridSpec, PhysicalConstants, RealField};
use crate::state::{rk4_step, steps_to, EmOnlyState, UnitaryState};
use crate::unitary::{unitary_rate, unitary_step, PHI_FLOOR};

/// Default `|B⁰|` floor, relative to `max |B⁰|` on the initial slice.
pub const DEFAULT_B0_FLOOR: f64 = 1e-6;
/// Default negative-radicand tolerance, relative to `max |radicand|` on the
/// initial slice.
pub const DEFAULT_RADICAND_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    /// Absolute floor on `|B⁰|`.
    pub b0_floor: f64,
    /// Absolute tolerance for negative radicands (clamped to zero inside it).
    pub radicand_tolerance: f64,
}

impl ReconstructionConfig {
    /// Defaults scaled from a reference slice.
    pub fn for_slice(em: &EmOnlyState, grid: &GridSpec, consts: &PhysicalConstants) -> Result<Self> {
        em.validate(grid)?;
        consts.require_charge()?;
        let b0_scale = max_abs(&em.b[0]);
        let numerator = gauss_numerator(&em.b, &em.b_dot, grid.dx());
        let e2 = consts.e * consts.e;
        let r_scale = (0..grid.n_x())
            .filter(|&i| em.b[0][i] != 0.0)
            .map(|i| ((numerator[i] - consts.background) / (-2.0 * e2 * em.b[0][i])).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            b0_floor: DEFAULT_B0_FLOOR * b0_scale,
            radicand_tolerance: DEFAULT_RADICAND_TOLERANCE * r_scale.max(f64::MIN_POSITIVE),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub phi_rec: RealField,
    pub phi_dot_rec: RealField,
    pub radicand_min: f64,
    pub b0_min_abs: f64,
}

// Coefficient of B̈^ν in the time component of □B_μ − B^ν_{,νμ}:
// □B_0 contributes +B̈⁰, the divergence term −∂_0(∂_νB^ν) contributes −B̈⁰.
#[allow(clippy::eq_op)]
const B_DDOT_COEFF: [f64; 2] = [1.0 - 1.0, 0.0];

/// Time component of `□B_μ − B^ν_{,νμ}` on the lattice, assembled term by
/// term. The second time derivatives enter with net coefficient zero, so
/// the result does not depend on `b_ddot`.
pub fn maxwell_time_component(
    b: &[RealField; 2],
    b_dot: &[RealField; 2],
    b_ddot: &[RealField; 2],
    dx: f64,
) -> RealField {
    let mut out = gauss_numerator(b, b_dot, dx);
    for (nu, &c) in B_DDOT_COEFF.iter().enumerate() {
        if c != 0.0 {
            for (o, &v) in out.iter_mut().zip(b_ddot[nu].iter()) {
                *o += c * v;
            }
        }
    }
    out
}

/// `−∂_x(∂_xB⁰ + Ḃ¹)`, the part of the Maxwell time component that
/// survives once `B̈⁰` cancels. Written as `∂_x E` with `E = −∂_xB⁰ − Ḃ¹`.
pub fn gauss_numerator(b: &[RealField; 2], b_dot: &[RealField; 2], dx: f64) -> RealField {
    let field = crate::kgm::electric_field(b, b_dot, dx);
    central_diff(&field, dx)
}

/// Pointwise `(N − ρ_bg) / (−2e²B⁰)`. Errors where `|B⁰| < b0_floor`,
/// except on a matter-free slice (`B⁰ ≡ 0` and `N ≡ ρ_bg`), whose radicand
/// is zero.
pub fn radicand(
    em: &EmOnlyState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    b0_floor: f64,
) -> Result<RealField> {
    em.validate(grid)?;
    consts.require_charge()?;
    let numerator = gauss_numerator(&em.b, &em.b_dot, grid.dx());
    if em.b[0].iter().all(|&v| v == 0.0) && numerator.iter().all(|&v| v == consts.background) {
        return Ok(Field::zeros(grid.n_x()));
    }
    check_b0(&em.b[0], b0_floor, em.t)?;
    let e2 = consts.e * consts.e;
    Ok(Field::from_fn(grid.n_x(), |i| {
        (numerator[i] - consts.background) / (-2.0 * e2 * em.b[0][i])
    }))
}

/// The radicand at one point from exact derivatives:
/// `(−∂_x²B⁰ − ∂_xḂ¹ − ρ_bg) / (−2e²B⁰)`.
pub fn radicand_at(b0: f64, b0_xx: f64, b1_dot_x: f64, consts: &PhysicalConstants) -> f64 {
    (-b0_xx - b1_dot_x - consts.background) / (-2.0 * consts.e * consts.e * b0)
}

fn check_b0(b0: &[f64], floor: f64, t: f64) -> Result<()> {
    match b0.iter().position(|v| !(v.abs() >= floor) || *v == 0.0) {
        Some(site) => Err(Error::VanishingB0 {
            site,
            value: b0[site],
            floor,
            t,
        }),
        None => Ok(()),
    }
}

pub fn reconstruct_phi(
    em: &EmOnlyState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    cfg: &ReconstructionConfig,
) -> Result<RealField> {
    let r = radicand(em, grid, consts, cfg.b0_floor)?;
    if let Some(site) = r.iter().position(|&v| v < -cfg.radicand_tolerance) {
        return Err(Error::NegativeRadicand {
            site,
            value: r[site],
            tolerance: cfg.radicand_tolerance,
            t: em.t,
        });
    }
    Ok(r.map(|&v| v.max(0.0).sqrt()))
}

/// `φ̇` from current conservation in flux form. A field that vanishes
/// identically has `φ̇ = 0`.
pub fn reconstruct_phi_dot(
    em: &EmOnlyState,
    phi: &[f64],
    grid: &GridSpec,
    cfg: &ReconstructionConfig,
) -> Result<RealField> {
    em.validate(grid)?;
    grid.check(phi)?;
    let n = grid.n_x();
    if phi.iter().all(|&p| p == 0.0) {
        return Ok(Field::zeros(n));
    }
    check_b0(&em.b[0], cfg.b0_floor, em.t)?;
    check_phi(phi, PHI_FLOOR * max_abs(phi), em.t)?;
    let flux = Field::from_fn(n, |i| em.b[1][i] * phi[i] * phi[i]);
    let d_flux = central_diff(&flux, grid.dx());
    Ok(Field::from_fn(n, |i| {
        -(em.b_dot[0][i] * phi[i] * phi[i] + d_flux[i]) / (2.0 * em.b[0][i] * phi[i])
    }))
}

/// `φ̇` from the product-rule expansion of current conservation,
/// `−[(Ḃ⁰ + ∂_xB¹)φ + 2B¹∂_xφ] / (2B⁰)`. Agrees with
/// [`reconstruct_phi_dot`] to second order in `dx`; the flux form is the one
/// used for stepping because it conserves charge exactly.
pub fn reconstruct_phi_dot_product_rule(
    em: &EmOnlyState,
    phi: &[f64],
    grid: &GridSpec,
    cfg: &ReconstructionConfig,
) -> Result<RealField> {
    em.validate(grid)?;
    grid.check(phi)?;
    check_b0(&em.b[0], cfg.b0_floor, em.t)?;
    let dx = grid.dx();
    let d_b1 = central_diff(&em.b[1], dx);
    let d_phi = central_diff(phi, dx);
    Ok(Field::from_fn(grid.n_x(), |i| {
        -((em.b_dot[0][i] + d_b1[i]) * phi[i] + 2.0 * em.b[1][i] * d_phi[i]) / (2.0 * em.b[0][i])
    }))
}

fn check_phi(phi: &[f64], floor: f64, t: f64) -> Result<()> {
    match phi.iter().position(|v| v.abs() < floor || *v == 0.0) {
        Some(site) => Err(Error::VanishingPhi {
            site,
            value: phi[site],
            floor,
            t,
        }),
        None => Ok(()),
    }
}

pub fn reconstruct(
    em: &EmOnlyState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructionReport> {
    let r = radicand(em, grid, consts, cfg.b0_floor)?;
    let phi_rec = reconstruct_phi(em, grid, consts, cfg)?;
    let phi_dot_rec = reconstruct_phi_dot(em, &phi_rec, grid, cfg)?;
    Ok(ReconstructionReport {
        phi_rec,
        phi_dot_rec,
        radicand_min: r.iter().copied().fold(f64::INFINITY, f64::min),
        b0_min_abs: min_abs(&em.b[0]),
    })
}

/// Residual of `∂_t(B⁰φ²) + ∂_x(B¹φ²) = 0`.
pub fn conservation_residual(
    phi: &[f64],
    phi_dot: &[f64],
    b: &[RealField; 2],
    b_dot: &[RealField; 2],
    dx: f64,
) -> RealField {
    let n = phi.len();
    let flux = Field::from_fn(n, |i| b[1][i] * phi[i] * phi[i]);
    let d_flux = central_diff(&flux, dx);
    Field::from_fn(n, |i| {
        b_dot[0][i] * phi[i] * phi[i] + 2.0 * b[0][i] * phi[i] * phi_dot[i] + d_flux[i]
    })
}

/// `B̈⁰` from the time derivative of current conservation:
///
/// ```text
/// B̈⁰φ² + 4Ḃ⁰φφ̇ + 2B⁰(φ̇² + φφ̈) + ∂_x(Ḃ¹φ² + 2B¹φφ̇) = 0
/// ```
///
/// Where `φ` vanishes identically the constraint is empty and `B̈⁰ = 0` is
/// returned. Otherwise every site must satisfy `|φ| ≥ phi_floor`.
#[allow(clippy::too_many_arguments)]
pub fn b0_closure(
    phi: &[f64],
    phi_dot: &[f64],
    phi_ddot: &[f64],
    b: &[RealField; 2],
    b_dot: &[RealField; 2],
    dx: f64,
    phi_floor: f64,
    t: f64,
) -> Result<RealField> {
    let n = phi.len();
    if phi.iter().all(|&p| p == 0.0) {
        return Ok(Field::zeros(n));
    }
    check_phi(phi, phi_floor, t)?;
    let flux_dot = Field::from_fn(n, |i| {
        b_dot[1][i] * phi[i] * phi[i] + 2.0 * b[1][i] * phi[i] * phi_dot[i]
    });
    let d_flux_dot = central_diff(&flux_dot, dx);
    Ok(Field::from_fn(n, |i| {
        let (p, pd) = (phi[i], phi_dot[i]);
        -(4.0 * b_dot[0][i] * p * pd + 2.0 * b[0][i] * (pd * pd + p * phi_ddot[i]) + d_flux_dot[i]) / (p * p)
    }))
}

fn rebuild(
    em: &EmOnlyState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    cfg: &ReconstructionConfig,
) -> Result<UnitaryState> {
    let phi = reconstruct_phi(em, grid, consts, cfg)?;
    let phi_dot = reconstruct_phi_dot(em, &phi, grid, cfg)?;
    Ok(UnitaryState {
        phi,
        phi_dot,
        b: em.b.clone(),
        b_dot: em.b_dot.clone(),
        t: em.t,
    })
}

fn em_rate(
    em: &EmOnlyState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    cfg: &ReconstructionConfig,
) -> Result<EmOnlyState> {
    let full = rebuild(em, grid, consts, cfg)?;
    let rate = unitary_rate(&full, grid.dx(), consts)?;
    Ok(EmOnlyState {
        b: rate.b,
        b_dot: rate.b_dot,
        t: 1.0,
    })
}

/// `(B̈⁰, B̈¹)` for potential-only data.
pub fn em_second_derivatives(
    em: &EmOnlyState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    cfg: &ReconstructionConfig,
) -> Result<[RealField; 2]> {
    Ok(em_rate(em, grid, consts, cfg)?.b_dot)
}

pub fn em_only_step(
    em: &EmOnlyState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    cfg: &ReconstructionConfig,
) -> Result<EmOnlyState> {
    em.validate(grid)?;
    rk4_step(em, grid.dt(), |s| em_rate(s, grid, consts, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceSample {
    pub t: f64,
    pub l2_b0: f64,
    pub l2_b1: f64,
    pub linf_b0: f64,
    pub linf_b1: f64,
    /// Minimum radicand on the EM-only path.
    pub radicand_min: f64,
    /// Minimum `|B⁰|` on the EM-only path.
    pub b0_min_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Unitary,
    EmOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathFailure {
    pub path: Path,
    pub step: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub samples: Vec<DivergenceSample>,
    /// First failure on either path; samples stop at the last common step.
    pub failure: Option<PathFailure>,
    pub final_unitary: UnitaryState,
    pub final_em_only: EmOnlyState,
}

/// Advances the same data with the unitary stepper and the EM-only stepper
/// (in parallel) and records the divergence of `B` at every step.
pub fn compare_evolutions(
    initial: &UnitaryState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    cfg: &ReconstructionConfig,
    t_end: f64,
) -> Result<ComparisonReport> {
    initial.validate(grid)?;
    let steps = steps_to(t_end - initial.t, grid.dt());

    let (unitary_path, em_path) = rayon::join(
        || {
            let mut s = initial.clone();
            let mut path = vec![s.clone()];
            for k in 0..steps {
                match unitary_step(&s, grid, consts) {
                    Ok(next) => s = next,
                    Err(error) => return (path, Some((k, error))),
                }
                path.push(s.clone());
            }
            (path, None)
        },
        || {
            let mut s = initial.to_em_only();
            let mut path = vec![s.clone()];
            for k in 0..steps {
                match em_only_step(&s, grid, consts, cfg) {
                    Ok(next) => s = next,
                    Err(error) => return (path, Some((k, error))),
                }
                path.push(s.clone());
            }
            (path, None)
        },
    );
    let (u_states, u_fail) = unitary_path;
    let (e_states, e_fail) = em_path;

    let failure = match (u_fail, e_fail) {
        (Some((ku, eu)), Some((ke, ee))) => Some(if ke < ku {
            PathFailure {
                path: Path::EmOnly,
                step: ke,
                error: ee,
            }
        } else {
            PathFailure {
                path: Path::Unitary,
                step: ku,
                error: eu,
            }
        }),
        (Some((step, error)), None) => Some(PathFailure {
            path: Path::Unitary,
            step,
            error,
        }),
        (None, Some((step, error))) => Some(PathFailure {
            path: Path::EmOnly,
            step,
            error,
        }),
        (None, None) => None,
    };

    let n = grid.n_x();
    let mut samples = Vec::with_capacity(u_states.len().min(e_states.len()));
    for (u, e) in u_states.iter().zip(&e_states) {
        let d0 = Field::from_fn(n, |i| u.b[0][i] - e.b[0][i]);
        let d1 = Field::from_fn(n, |i| u.b[1][i] - e.b[1][i]);
        let radicand_min = radicand(e, grid, consts, 0.0)
            .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NAN);
        samples.push(DivergenceSample {
            t: e.t,
            l2_b0: grid.l2_norm(&d0),
            l2_b1: grid.l2_norm(&d1),
            linf_b0: max_abs(&d0),
            linf_b1: max_abs(&d1),
            radicand_min,
            b0_min_abs: min_abs(&e.b[0]),
        });
    }
    let common = samples.len();
    Ok(ComparisonReport {
        samples,
        failure,
        final_unitary: u_states[common - 1].clone(),
        final_em_only: e_states[common - 1].clone(),
    })
}

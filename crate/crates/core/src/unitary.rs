//! Unitary gauge: the charged scalar is made real by absorbing its phase
//! into the potential, `ψ = e^{−iθ}φ`, `B_μ = A_μ − θ_{,μ}/e`.
//!
//! The real system is
//!
//! ```text
//! □φ − (e²B_μB^μ − m²)φ = 0
//! □B_μ − B^ν_{,νμ}      = j_μ,   j_μ = −2e²B_μφ²
//! ```
//!
//! The spatial component of the Maxwell equation is stepped directly. Its
//! time component contains no `B̈` and is a constraint (Gauss law); `B̈⁰`
//! instead comes from differentiating current conservation in time (see
//! [`crate::em_only::b0_closure`]). Both constraints are preserved exactly by
//! the semi-discrete scheme.

use num_complex::Complex64;

use crate::em_only::{b0_closure, conservation_residual, gauss_numerator};
use crate::error::{Error, Result};
use crate::grid::{
    central_diff, compact_laplacian, forward_diff, max_abs, min_abs, right, Field, GridSpec,
    PhysicalConstants, RealField,
};
use crate::kgm::kgm_rhs;
use crate::state::{rk4_step, ComplexKgmState, UnitaryState};

/// Default node threshold, relative to `max |ψ|`.
pub const DEFAULT_NODE_THRESHOLD: f64 = 1e-8;
/// `|φ|` floor, relative to `max |φ|`, below which the `B̈⁰` closure refuses
/// to divide.
pub const PHI_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransformResult {
    pub unitary: UnitaryState,
    /// Unwrapped gauge phase with `ψ = e^{−iθ}φ`.
    pub theta: RealField,
    /// Net phase winding of `ψ` around the periodic domain.
    pub winding: i64,
    /// Sites where the signed branch of `φ` is negative.
    pub flipped_sites: Vec<usize>,
}

/// Transforms a complex slice to the unitary gauge.
///
/// `node_threshold` is relative to `max |ψ|`. The sign of `φ` follows the
/// branch that keeps the phase continuous between neighbours, so `φ` may
/// change sign where `ψ` passes close to zero. An identically vanishing
/// `ψ` maps to the identity transform.
pub fn to_unitary(
    state: &ComplexKgmState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
    node_threshold: f64,
) -> Result<GaugeTransformResult> {
    state.validate(grid)?;
    consts.require_charge()?;
    let n = grid.n_x();
    let dx = grid.dx();
    let e = consts.e;

    let modulus: RealField = state.psi.map(|z| z.norm());
    let scale = max_abs(&modulus);
    if scale == 0.0 {
        let unitary = UnitaryState {
            phi: Field::zeros(n),
            phi_dot: Field::zeros(n),
            b: state.a.clone(),
            b_dot: state.a_dot.clone(),
            t: state.t,
        };
        return Ok(GaugeTransformResult {
            unitary,
            theta: Field::zeros(n),
            winding: 0,
            flipped_sites: Vec::new(),
        });
    }
    let threshold = node_threshold * scale;
    let nodes: Vec<usize> = (0..n).filter(|&i| modulus[i] < threshold).collect();
    if !nodes.is_empty() {
        return Err(Error::Node {
            sites: nodes,
            threshold,
        });
    }

    let (chi, sign, winding) = track_phase(&state.psi)?;
    let theta: RealField = chi.map(|c| -c);
    let phi: RealField = Field::from_fn(n, |i| sign[i] * modulus[i]);
    let gauge = |i: usize| Complex64::from_polar(1.0, theta[i]);

    let phi_dot: RealField = Field::from_fn(n, |i| (gauge(i) * state.psi_dot[i]).re);
    let theta_t: RealField = Field::from_fn(n, |i| -(gauge(i) * state.psi_dot[i]).im / phi[i]);
    let psi_dd = kgm_rhs(state, grid, consts)?.psi_dot;
    let theta_tt: RealField = Field::from_fn(n, |i| {
        -((gauge(i) * psi_dd[i]).im + 2.0 * theta_t[i] * phi_dot[i]) / phi[i]
    });
    let theta_x = wound_derivative(&theta, -2.0 * std::f64::consts::PI * winding as f64, dx);
    let d_theta_t = central_diff(&theta_t, dx);

    // B_0 = A_0 − θ_{,0}/e and B_1 = A_1 − θ_{,1}/e, with B^1 = −B_1.
    let b0 = Field::from_fn(n, |i| state.a[0][i] - theta_t[i] / e);
    let b1 = Field::from_fn(n, |i| state.a[1][i] + theta_x[i] / e);
    let b0_dot = Field::from_fn(n, |i| state.a_dot[0][i] - theta_tt[i] / e);
    let b1_dot = Field::from_fn(n, |i| state.a_dot[1][i] + d_theta_t[i] / e);

    let flipped_sites = (0..n).filter(|&i| sign[i] < 0.0).collect();
    let unitary = UnitaryState {
        phi,
        phi_dot,
        b: [b0, b1],
        b_dot: [b0_dot, b1_dot],
        t: state.t,
    };
    unitary.check_finite_state()?;
    Ok(GaugeTransformResult {
        unitary,
        theta,
        winding,
        flipped_sites,
    })
}

fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Continuous phase `χ` and sign `s` with `ψ_i = s_i |ψ_i| e^{iχ_i}`,
/// choosing at each site the branch closest to the previous phase.
fn track_phase(psi: &[Complex64]) -> Result<(RealField, Vec<f64>, i64)> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let n = psi.len();
    let mut chi = Vec::with_capacity(n);
    let mut sign = Vec::with_capacity(n);
    chi.push(psi[0].arg());
    sign.push(1.0);
    let step = |prev: f64, z: Complex64| -> (f64, f64) {
        let d = wrap_angle(z.arg() - prev);
        if d.abs() <= FRAC_PI_2 {
            (prev + d, 1.0)
        } else {
            (prev + wrap_angle(z.arg() + PI - prev), -1.0)
        }
    };
    for z in psi.iter().skip(1) {
        let (c, s) = step(chi[chi.len() - 1], *z);
        chi.push(c);
        sign.push(s);
    }
    let (closing, closing_sign) = step(chi[n - 1], psi[0]);
    if closing_sign < 0.0 {
        return Err(Error::TopologicalObstruction);
    }
    let turns = (closing - chi[0]) / (2.0 * PI);
    let winding = turns.round();
    debug_assert!((turns - winding).abs() < 1e-9);
    Ok((chi.into(), sign, winding as i64))
}

/// Central difference of a function that jumps by `shift` across the
/// periodic boundary (`f[n] = f[0] + shift`).
fn wound_derivative(f: &[f64], shift: f64, dx: f64) -> RealField {
    let n = f.len();
    Field::from_fn(n, |i| {
        let up = if i + 1 == n { f[0] + shift } else { f[i + 1] };
        let down = if i == 0 { f[n - 1] - shift } else { f[i - 1] };
        (up - down) / (2.0 * dx)
    })
}

impl UnitaryState {
    fn check_finite_state(&self) -> Result<()> {
        use crate::state::OdeState;
        self.check_finite()
    }
}

/// Unitary-gauge current `j^μ = −2e²B^μφ²`.
pub fn unitary_current(state: &UnitaryState, consts: &PhysicalConstants) -> [RealField; 2] {
    let e2 = consts.e * consts.e;
    [0, 1].map(|mu| state.b[mu].zip_map(&state.phi, |b, p| -2.0 * e2 * b * p * p))
}

/// `(φ̈, B̈⁰, B̈¹)` for a unitary slice.
pub fn unitary_rhs(
    state: &UnitaryState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<(RealField, RealField, RealField)> {
    state.validate(grid)?;
    let rate = unitary_rate(state, grid.dx(), consts)?;
    let [b0_dd, b1_dd] = rate.b_dot;
    Ok((rate.phi_dot, b0_dd, b1_dd))
}

pub(crate) fn phi_second_derivative(state: &UnitaryState, dx: f64, consts: &PhysicalConstants) -> RealField {
    let lap = compact_laplacian(&state.phi, dx);
    let e2 = consts.e * consts.e;
    let m2 = consts.m * consts.m;
    Field::from_fn(state.phi.len(), |i| {
        let (b0, b1) = (state.b[0][i], state.b[1][i]);
        lap[i] + (e2 * (b0 * b0 - b1 * b1) - m2) * state.phi[i]
    })
}

pub(crate) fn unitary_rate(
    state: &UnitaryState,
    dx: f64,
    consts: &PhysicalConstants,
) -> Result<UnitaryState> {
    let n = state.phi.len();
    let phi_dd = phi_second_derivative(state, dx, consts);
    // Spatial Maxwell component: □B¹ − ∂¹(∂_νB^ν) = j¹. The ∂_x²B¹ terms
    // cancel identically, leaving B̈¹ = −∂_x Ḃ⁰ + j¹.
    let d_b0_dot = central_diff(&state.b_dot[0], dx);
    let e2 = consts.e * consts.e;
    let b1_dd = Field::from_fn(n, |i| {
        -d_b0_dot[i] - 2.0 * e2 * state.b[1][i] * state.phi[i] * state.phi[i]
    });
    let floor = PHI_FLOOR * max_abs(&state.phi);
    let b0_dd = b0_closure(
        &state.phi,
        &state.phi_dot,
        &phi_dd,
        &state.b,
        &state.b_dot,
        dx,
        floor,
        state.t,
    )?;
    Ok(UnitaryState {
        phi: state.phi_dot.clone(),
        phi_dot: phi_dd,
        b: state.b_dot.clone(),
        b_dot: [b0_dd, b1_dd],
        t: 1.0,
    })
}

pub fn unitary_step(
    state: &UnitaryState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<UnitaryState> {
    state.validate(grid)?;
    let dx = grid.dx();
    rk4_step(state, grid.dt(), |s| unitary_rate(s, dx, consts))
}

/// Field arguments of the Lagrangian density at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub phi: f64,
    pub phi_t: f64,
    pub phi_x: f64,
    pub b: [f64; 2],
    pub b_t: [f64; 2],
    pub b_x: [f64; 2],
}

/// Lagrangian density of the real system at one point:
/// `−⅛F^{μν}F_{μν} + ½e²B_μB^μφ² + ½(φ_{,μ}φ^{,μ} − m²φ²) − ½ρ_bg B⁰`.
///
/// In 1+1 dimensions `−⅛F^{μν}F_{μν} = ¼E²` with `E = −∂_xB⁰ − ∂_tB¹`. The
/// Maxwell weight ⅛ (rather than ¼) is what makes the Euler-Lagrange
/// equations reproduce the current `j = −2e²Bφ²` exactly.
pub fn lagrangian_at(jet: &Jet, consts: &PhysicalConstants) -> f64 {
    let e2 = consts.e * consts.e;
    let m2 = consts.m * consts.m;
    let field = -jet.b_x[0] - jet.b_t[1];
    let b_sq = jet.b[0] * jet.b[0] - jet.b[1] * jet.b[1];
    0.25 * field * field
        + 0.5 * e2 * b_sq * jet.phi * jet.phi
        + 0.5 * (jet.phi_t * jet.phi_t - jet.phi_x * jet.phi_x - m2 * jet.phi * jet.phi)
        - 0.5 * consts.background * jet.b[0]
}

/// Jets of a slice, with spatial derivatives from central differences.
pub fn slice_jets(state: &UnitaryState, grid: &GridSpec) -> Result<Vec<Jet>> {
    state.validate(grid)?;
    let dx = grid.dx();
    let phi_x = central_diff(&state.phi, dx);
    let b_x = [central_diff(&state.b[0], dx), central_diff(&state.b[1], dx)];
    Ok((0..grid.n_x())
        .map(|i| Jet {
            phi: state.phi[i],
            phi_t: state.phi_dot[i],
            phi_x: phi_x[i],
            b: [state.b[0][i], state.b[1][i]],
            b_t: [state.b_dot[0][i], state.b_dot[1][i]],
            b_x: [b_x[0][i], b_x[1][i]],
        })
        .collect())
}

pub fn unitary_lagrangian_density(
    state: &UnitaryState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<RealField> {
    Ok(slice_jets(state, grid)?
        .iter()
        .map(|j| lagrangian_at(j, consts))
        .collect())
}

/// Energy density conserved by the real system (on the Gauss-law surface):
/// `¼E² + ½e²((B⁰)² + (B¹)²)φ² + ½(φ̇² + φ_x² + m²φ²)`.
pub fn unitary_energy_density(
    state: &UnitaryState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<RealField> {
    state.validate(grid)?;
    let dx = grid.dx();
    let e2 = consts.e * consts.e;
    let m2 = consts.m * consts.m;
    let field = crate::kgm::electric_field(&state.b, &state.b_dot, dx);
    let grad = forward_diff(&state.phi, dx);
    Ok(Field::from_fn(grid.n_x(), |i| {
        let (b0, b1, p) = (state.b[0][i], state.b[1][i], state.phi[i]);
        0.25 * field[i] * field[i]
            + 0.5 * e2 * (b0 * b0 + b1 * b1) * p * p
            + 0.5 * (state.phi_dot[i].powi(2) + grad[i] * grad[i] + m2 * p * p)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryDiagnostics {
    /// `Σ j⁰ dx`, matter only.
    pub total_charge: f64,
    pub energy: f64,
    /// Max violation of the time component of the Maxwell equation.
    pub gauss_residual_max: f64,
    /// Max violation of `∂_t(B⁰φ²) + ∂_x(B¹φ²) = 0`.
    pub conservation_residual_max: f64,
    pub b0_min_abs: f64,
    pub phi_min_abs: f64,
}

pub fn unitary_diagnostics(
    state: &UnitaryState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<UnitaryDiagnostics> {
    state.validate(grid)?;
    let dx = grid.dx();
    let [j0, _] = unitary_current(state, consts);
    let numerator = gauss_numerator(&state.b, &state.b_dot, dx);
    let gauss = Field::from_fn(grid.n_x(), |i| numerator[i] - j0[i] - consts.background);
    let conservation = conservation_residual(&state.phi, &state.phi_dot, &state.b, &state.b_dot, dx);
    Ok(UnitaryDiagnostics {
        total_charge: grid.integrate(&j0),
        energy: grid.integrate(&unitary_energy_density(state, grid, consts)?),
        gauss_residual_max: max_abs(&gauss),
        conservation_residual_max: max_abs(&conservation),
        b0_min_abs: min_abs(&state.b[0]),
        phi_min_abs: min_abs(&state.phi),
    })
}

/// Indices `i` where `φ` changes sign between `i` and `i + 1`.
pub fn sign_changes(phi: &[f64]) -> Vec<usize> {
    let n = phi.len();
    (0..n).filter(|&i| phi[i] * phi[right(i, n)] < 0.0).collect()
}

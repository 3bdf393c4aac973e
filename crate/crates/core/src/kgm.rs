//! Complex Klein-Gordon-Maxwell evolution in Lorenz gauge.
//!
//! The scalar equation is `(∂^μ + ieA^μ)(∂_μ + ieA_μ)ψ + m²ψ = 0`, the
//! potential obeys `□A^μ = j^μ` (plus the static background in the time
//! component) once `∂_μA^μ = 0` is imposed, and the current is
//! `j_μ = ie(ψ*ψ_{,μ} − ψ*_{,μ}ψ) − 2e²A_μψ*ψ`.
//!
//! The covariant first-derivative terms are discretized in skew-symmetric
//! form, `D(Aψ) + A Dψ`, which conserves the lattice charge `Σ j⁰ dx`
//! exactly in continuous time.

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{
    central_diff, compact_laplacian, forward_diff, max_abs, ComplexField, Field, GridSpec, PhysicalConstants,
    RealField,
};
use crate::state::{rk4_step, ComplexKgmState};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgmDiagnostics {
    /// `Σ j⁰ dx`, matter only (the background is excluded).
    pub total_charge: f64,
    /// `max |∂_μA^μ|`.
    pub lorenz_residual_max: f64,
    pub energy: f64,
    /// `max |∂_μ j^μ|`.
    pub current_divergence_max: f64,
}

/// Contravariant current `(j⁰, j¹)`.
pub fn kg_current(
    state: &ComplexKgmState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<[RealField; 2]> {
    state.validate(grid)?;
    let psi_x = central_diff(&state.psi, grid.dx());
    Ok(current_parts(
        &state.psi,
        &state.psi_dot,
        &psi_x,
        &state.a,
        consts.e,
    ))
}

fn current_parts(
    psi: &[Complex64],
    psi_t: &[Complex64],
    psi_x: &[Complex64],
    a: &[RealField; 2],
    e: f64,
) -> [RealField; 2] {
    let n = psi.len();
    // j_0 = -2e Im(ψ* ψ_t) - 2e² A_0 |ψ|²; j^1 = -j_1 with A_1 = -A^1.
    let j0 = Field::from_fn(n, |i| {
        -2.0 * e * (psi[i].conj() * psi_t[i]).im - 2.0 * e * e * a[0][i] * psi[i].norm_sqr()
    });
    let j1 = Field::from_fn(n, |i| {
        2.0 * e * (psi[i].conj() * psi_x[i]).im - 2.0 * e * e * a[1][i] * psi[i].norm_sqr()
    });
    [j0, j1]
}

/// Time derivative of the state: `(ψ̇, ψ̈, Ȧ, Ä)`.
pub fn kgm_rhs(
    state: &ComplexKgmState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<ComplexKgmState> {
    state.validate(grid)?;
    Ok(rhs_unchecked(state, grid.dx(), consts))
}

fn rhs_unchecked(s: &ComplexKgmState, dx: f64, c: &PhysicalConstants) -> ComplexKgmState {
    let n = s.psi.len();
    let e = c.e;
    let psi_x = central_diff(&s.psi, dx);
    let lap = compact_laplacian(&s.psi, dx);
    let a1_psi: ComplexField = Field::from_fn(n, |i| s.psi[i] * s.a[1][i]);
    let d_a1_psi = central_diff(&a1_psi, dx);

    let psi_dd = Field::from_fn(n, |i| {
        let (a0, a1) = (s.a[0][i], s.a[1][i]);
        let psi = s.psi[i];
        let temporal = I * e * (psi * s.a_dot[0][i] + s.psi_dot[i] * (2.0 * a0));
        let spatial = I * e * (d_a1_psi[i] + psi_x[i] * a1);
        lap[i] - temporal - spatial + psi * (e * e * (a0 * a0 - a1 * a1) - c.m * c.m)
    });

    let [j0, j1] = current_parts(&s.psi, &s.psi_dot, &psi_x, &s.a, e);
    let lap_a0 = compact_laplacian(&s.a[0], dx);
    let lap_a1 = compact_laplacian(&s.a[1], dx);
    let a0_dd = Field::from_fn(n, |i| lap_a0[i] + j0[i] + c.background);
    let a1_dd = Field::from_fn(n, |i| lap_a1[i] + j1[i]);

    ComplexKgmState {
        psi: s.psi_dot.clone(),
        psi_dot: psi_dd,
        a: s.a_dot.clone(),
        a_dot: [a0_dd, a1_dd],
        t: 1.0,
    }
}

/// Advances the slice by `grid.dt()` with classical RK4.
pub fn kgm_step(
    state: &ComplexKgmState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<ComplexKgmState> {
    state.validate(grid)?;
    let dx = grid.dx();
    rk4_step(state, grid.dt(), |s| Ok(rhs_unchecked(s, dx, consts)))
}

/// Gauge-invariant energy density
/// `¼E² + ½(|D_tψ|² + |D_xψ|² + m²|ψ|²)` with `E = −∂_xA⁰ − ∂_tA¹`.
///
/// The field-strength weight matches the normalization of the current in
/// the Maxwell equation (the matter Lagrangian carries a factor ½), so this
/// is the quantity conserved by the coupled equations.
pub fn energy_density(
    state: &ComplexKgmState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<RealField> {
    state.validate(grid)?;
    let n = grid.n_x();
    let dx = grid.dx();
    let e = consts.e;
    let m2 = consts.m * consts.m;
    let ef = electric_field(&state.a, &state.a_dot, dx);
    let fwd = forward_diff(&state.psi, dx);
    Ok(Field::from_fn(n, |i| {
        let ip = crate::grid::right(i, n);
        let psi = state.psi[i];
        let dt_psi = state.psi_dot[i] + I * e * state.a[0][i] * psi;
        let a_link = 0.5 * (state.a[1][i] + state.a[1][ip]);
        let psi_link = (psi + state.psi[ip]) * 0.5;
        let dx_psi = fwd[i] - I * e * a_link * psi_link;
        0.25 * ef[i] * ef[i] + 0.5 * (dt_psi.norm_sqr() + dx_psi.norm_sqr() + m2 * psi.norm_sqr())
    }))
}

/// `E = −∂_x A⁰ − ∂_t A¹` (central differences).
pub(crate) fn electric_field(a: &[RealField; 2], a_dot: &[RealField; 2], dx: f64) -> RealField {
    let d_a0 = central_diff(&a[0], dx);
    Field::from_fn(a[0].len(), |i| -d_a0[i] - a_dot[1][i])
}

pub fn kgm_diagnostics(
    state: &ComplexKgmState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<KgmDiagnostics> {
    state.validate(grid)?;
    let dx = grid.dx();
    let e = consts.e;
    let n = grid.n_x();
    let [j0, j1] = kg_current(state, grid, consts)?;
    let d_a1 = central_diff(&state.a[1], dx);
    let lorenz: RealField = Field::from_fn(n, |i| state.a_dot[0][i] + d_a1[i]);

    let rate = rhs_unchecked(state, dx, consts);
    let d_j1 = central_diff(&j1, dx);
    let divergence: RealField = Field::from_fn(n, |i| {
        let psi = state.psi[i];
        let dj0 = -2.0 * e * (psi.conj() * rate.psi_dot[i]).im
            - 2.0
                * e
                * e
                * (state.a_dot[0][i] * psi.norm_sqr()
                    + 2.0 * state.a[0][i] * (psi.conj() * state.psi_dot[i]).re);
        dj0 + d_j1[i]
    });

    Ok(KgmDiagnostics {
        total_charge: grid.integrate(&j0),
        lorenz_residual_max: max_abs(&lorenz),
        energy: grid.integrate(&energy_density(state, grid, consts)?),
        current_divergence_max: max_abs(&divergence),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(n: usize, l: f64, e: f64) -> (GridSpec, PhysicalConstants) {
        let dx = l / n as f64;
        (
            GridSpec::new(n, dx, 0.2 * dx).unwrap(),
            PhysicalConstants::new(e, 1.0).unwrap(),
        )
    }

    fn plane_wave(grid: &GridSpec, mode: i32, m: f64, amp: f64) -> (ComplexKgmState, f64) {
        let k = 2.0 * PI * mode as f64 / grid.length();
        let omega = (k * k + m * m).sqrt();
        let mut s = ComplexKgmState::zeros(grid.n_x());
        s.psi = Field::from_fn(grid.n_x(), |i| Complex64::from_polar(amp, k * grid.x(i)));
        s.psi_dot = s.psi.map(|z| -I * omega * z);
        (s, omega)
    }

    #[test]
    fn real_psi_without_potential_carries_no_current() {
        let (g, c) = setup(32, 4.0, 1.3);
        let mut s = ComplexKgmState::zeros(32);
        s.psi = Field::from_fn(32, |i| Complex64::new((g.x(i)).sin() + 2.0, 0.0));
        s.psi_dot = Field::from_fn(32, |i| Complex64::new(g.x(i).cos(), 0.0));
        let [j0, j1] = kg_current(&s, &g, &c).unwrap();
        assert!(j0.iter().chain(j1.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn oscillating_uniform_field_current() {
        // ψ = exp(-iEt): j⁰ = 2eE, j¹ = 0.
        let (g, c) = setup(16, 2.0, 0.7);
        let energy = 1.9;
        let mut s = ComplexKgmState::zeros(16);
        s.psi = Field::constant(16, Complex64::new(1.0, 0.0));
        s.psi_dot = Field::constant(16, Complex64::new(0.0, -energy));
        let [j0, j1] = kg_current(&s, &g, &c).unwrap();
        for i in 0..16 {
            assert!((j0[i] - 2.0 * 0.7 * energy).abs() < 1e-14);
            assert_eq!(j1[i], 0.0);
        }
    }

    #[test]
    fn uniform_potential_current() {
        // ψ = 1, A⁰ = a0: j⁰ = -2e²a0.
        let (g, c) = setup(16, 2.0, 1.5);
        let mut s = ComplexKgmState::zeros(16);
        s.psi = Field::constant(16, Complex64::new(1.0, 0.0));
        s.a[0] = Field::constant(16, 0.4);
        let [j0, _] = kg_current(&s, &g, &c).unwrap();
        assert!(j0.iter().all(|&v| (v + 2.0 * 1.5 * 1.5 * 0.4).abs() < 1e-14));
    }

    #[test]
    fn zero_state_has_zero_rate() {
        let (g, c) = setup(16, 2.0, 1.0);
        let s = ComplexKgmState::zeros(16);
        let r = kgm_rhs(&s, &g, &c).unwrap();
        assert!(r.psi_dot.iter().all(|z| z.norm() == 0.0));
        assert!(r.a_dot.iter().all(|f| f.iter().all(|&v| v == 0.0)));
        let next = kgm_step(&s, &g, &c).unwrap();
        assert_eq!(next.psi, s.psi);
        assert!((next.t - g.dt()).abs() < 1e-15);
        let d = kgm_diagnostics(&s, &g, &c).unwrap();
        assert_eq!(d.total_charge, 0.0);
        assert_eq!(d.energy, 0.0);
        assert_eq!(d.lorenz_residual_max, 0.0);
        assert_eq!(d.current_divergence_max, 0.0);
    }

    #[test]
    fn uniform_field_at_rest() {
        let (g, c) = setup(16, 2.0, 1.0);
        let mut s = ComplexKgmState::zeros(16);
        s.psi = Field::constant(16, Complex64::new(1.0, 0.0));
        let r = kgm_rhs(&s, &g, &c).unwrap();
        assert!(r
            .psi_dot
            .iter()
            .all(|z| (z.re + 1.0).abs() < 1e-14 && z.im == 0.0));
        assert!(r.a_dot.iter().all(|f| f.iter().all(|&v| v == 0.0)));
        let d = kgm_diagnostics(&s, &g, &c).unwrap();
        assert!((d.energy - 0.5 * g.length()).abs() < 1e-12);
    }

    #[test]
    fn free_plane_wave_dispersion() {
        let (g, c) = setup(64, 8.0, 0.0);
        let (s, omega) = plane_wave(&g, 3, c.m, 1.0);
        let r = kgm_rhs(&s, &g, &c).unwrap();
        let k = 2.0 * PI * 3.0 / g.length();
        // The lattice Laplacian gives -(2 - 2cos k dx)/dx² instead of -k².
        let k_lat2 = (2.0 - 2.0 * (k * g.dx()).cos()) / (g.dx() * g.dx());
        for i in 0..64 {
            let expected = -s.psi[i] * (k_lat2 + 1.0);
            assert!((r.psi_dot[i] - expected).norm() < 1e-12);
        }
        assert!((k_lat2 + 1.0 - omega * omega).abs() < k.powi(4) * g.dx().powi(2) / 12.0 * 1.01);
    }

    #[test]
    fn free_plane_wave_period_converges() {
        let mut errs = Vec::new();
        let mut drifts = Vec::new();
        for n in [64usize, 128, 256] {
            let (g, c) = setup(n, 8.0, 0.0);
            let (mut s, omega) = plane_wave(&g, 1, 1.0, 1.0);
            let period = 2.0 * PI / omega;
            let steps = (period / g.dt()).ceil() as usize;
            let g = g.with_dt(period / steps as f64).unwrap();
            let s0 = s.clone();
            let e0 = kgm_diagnostics(&s, &g, &c).unwrap().energy;
            let mut drift = 0.0_f64;
            for _ in 0..steps {
                s = kgm_step(&s, &g, &c).unwrap();
                let e = kgm_diagnostics(&s, &g, &c).unwrap().energy;
                drift = drift.max((e - e0).abs() / e0);
            }
            let err = (0..n).map(|i| (s.psi[i] - s0.psi[i]).norm()).fold(0.0, f64::max);
            errs.push(err);
            drifts.push(drift);
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.8, "{errs:?}");
        }
        assert!(drifts.iter().all(|&d| d < 1e-6), "{drifts:?}");
    }

    #[test]
    fn global_phase_leaves_observables_unchanged() {
        let (g, c) = setup(64, 6.4, 1.0);
        let mut s = ComplexKgmState::zeros(64);
        s.psi = Field::from_fn(64, |i| {
            let x = g.x(i);
            Complex64::new(0.6 + 0.2 * (x).sin(), 0.1 * (2.0 * x).cos())
        });
        s.psi_dot = s.psi.map(|z| -I * z);
        let phase = Complex64::from_polar(1.0, 0.83);
        let mut rotated = s.clone();
        rotated.psi = s.psi.map(|z| z * phase);
        rotated.psi_dot = s.psi_dot.map(|z| z * phase);
        let c = c.with_background(-1.0);
        let (mut a, mut b) = (s, rotated);
        for _ in 0..20 {
            a = kgm_step(&a, &g, &c).unwrap();
            b = kgm_step(&b, &g, &c).unwrap();
        }
        let ja = kg_current(&a, &g, &c).unwrap();
        let jb = kg_current(&b, &g, &c).unwrap();
        for i in 0..64 {
            assert!((a.psi[i].norm() - b.psi[i].norm()).abs() < 1e-12);
            assert!((ja[0][i] - jb[0][i]).abs() < 1e-12);
            assert!((ja[1][i] - jb[1][i]).abs() < 1e-12);
        }
        let ea = kgm_diagnostics(&a, &g, &c).unwrap().energy;
        let eb = kgm_diagnostics(&b, &g, &c).unwrap().energy;
        assert!((ea - eb).abs() < 1e-11 * ea.abs());
    }
}

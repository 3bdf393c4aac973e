//! Initial-data recipes for the complex system.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::{central_diff, Field, GridSpec, PhysicalConstants};
use crate::kgm::kg_current;
use crate::state::ComplexKgmState;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Gaussian bump on a uniform charged condensate.
///
/// `ψ = (φ₀ + a g) e^{iκg}` with `g = exp(−(x − L/2)²/2σ²)`, `ψ̇ = −iwψ`,
/// `A = 0`, `Ȧ⁰ = 0` and an electric kick `Ȧ¹ = ε (x − L/2)/σ · g`. The
/// local frequency `w` is chosen so that the discrete Gauss law holds with
/// the neutralising background `ρ_bg = −2emφ₀²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams {
    pub phi0: f64,
    pub amplitude: f64,
    pub width: f64,
    pub chirp: f64,
    pub kick: f64,
}

impl Default for PacketParams {
    fn default() -> Self {
        Self {
            phi0: 0.5,
            amplitude: 0.3,
            width: 1.0,
            chirp: 0.5,
            kick: 0.1,
        }
    }
}

/// Returns the state and the background density it requires.
pub fn packet(
    grid: &GridSpec,
    consts: &PhysicalConstants,
    p: &PacketParams,
) -> Result<(ComplexKgmState, f64)> {
    consts.require_charge()?;
    if !(p.width > 0.0) || !(p.phi0 > 0.0) {
        return Err(Error::InvalidConstants(
            "packet needs phi0 > 0 and width > 0".into(),
        ));
    }
    let n = grid.n_x();
    let centre = 0.5 * grid.length();
    let bump = Field::from_fn(n, |i| {
        let u = (grid.x(i) - centre) / p.width;
        (-0.5 * u * u).exp()
    });
    let (e, m) = (consts.e, consts.m);
    let mut s = ComplexKgmState::zeros(n);
    s.psi = Field::from_fn(n, |i| {
        Complex64::from_polar(p.phi0 + p.amplitude * bump[i], p.chirp * bump[i])
    });
    s.a_dot[1] = Field::from_fn(n, |i| p.kick * (grid.x(i) - centre) / p.width * bump[i]);
    let div_kick = central_diff(&s.a_dot[1], grid.dx());
    let background = -2.0 * e * m * p.phi0 * p.phi0;
    s.psi_dot = Field::from_fn(n, |i| {
        let w = (-background - div_kick[i]) / (2.0 * e * s.psi[i].norm_sqr());
        -I * w * s.psi[i]
    });
    s.validate(grid)?;
    Ok((s, background))
}

/// `ψ = a e^{ikx}` with `k = 2π·mode/L` and the lattice frequency
/// `E² = (2 sin(k dx/2)/dx)² + m²`, potential zero.
pub fn plane_wave(grid: &GridSpec, consts: &PhysicalConstants, amplitude: f64, mode: i64) -> ComplexKgmState {
    let n = grid.n_x();
    let dx = grid.dx();
    let k = 2.0 * PI * mode as f64 / grid.length();
    let k_lat = 2.0 * (0.5 * k * dx).sin() / dx;
    let energy = (k_lat * k_lat + consts.m * consts.m).sqrt();
    let mut s = ComplexKgmState::zeros(n);
    s.psi = Field::from_fn(n, |i| Complex64::from_polar(amplitude, k * grid.x(i)));
    s.psi_dot = s.psi.map(|z| -I * energy * z);
    s
}

/// Uniform density cancelling the total charge of the slice.
pub fn neutralising_background(
    state: &ComplexKgmState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<f64> {
    let [j0, _] = kg_current(state, grid, consts)?;
    Ok(-grid.integrate(&j0) / grid.length())
}

#[derive(Debug, Deserialize)]
struct Row {
    x: f64,
    re_psi: f64,
    im_psi: f64,
    re_psi_t: f64,
    im_psi_t: f64,
    a0: f64,
    a1: f64,
    a0_t: f64,
    a1_t: f64,
}

/// Header of the CSV initial-data format.
pub const CSV_COLUMNS: &str = "x,re_psi,im_psi,re_psi_t,im_psi_t,a0,a1,a0_t,a1_t";

/// Reads a complex slice with one row per site in [`CSV_COLUMNS`] order.
/// The `x` column must match the grid.
pub fn from_csv(path: &Path, grid: &GridSpec) -> std::result::Result<ComplexKgmState, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let rows: Vec<Row> = reader
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if rows.len() != grid.n_x() {
        return Err(format!(
            "{}: {} rows, grid has {} sites",
            path.display(),
            rows.len(),
            grid.n_x()
        ));
    }
    for (i, r) in rows.iter().enumerate() {
        if (r.x - grid.x(i)).abs() > 1e-9 * grid.length().max(1.0) {
            return Err(format!(
                "{}: row {} has x = {}, grid expects {}",
                path.display(),
                i + 2,
                r.x,
                grid.x(i)
            ));
        }
    }
    let n = grid.n_x();
    let mut s = ComplexKgmState::zeros(n);
    s.psi = rows.iter().map(|r| Complex64::new(r.re_psi, r.im_psi)).collect();
    s.psi_dot = rows
        .iter()
        .map(|r| Complex64::new(r.re_psi_t, r.im_psi_t))
        .collect();
    s.a = [
        rows.iter().map(|r| r.a0).collect(),
        rows.iter().map(|r| r.a1).collect(),
    ];
    s.a_dot = [
        rows.iter().map(|r| r.a0_t).collect(),
        rows.iter().map(|r| r.a1_t).collect(),
    ];
    s.validate(grid).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(s)
}

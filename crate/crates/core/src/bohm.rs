//! Tracer particles carried by the current of the real field.
//!
//! In the unitary gauge the current is proportional to the potential, so
//! the guidance velocity `j¹/j⁰ = B¹/B⁰` does not involve `φ` at all.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{interpolate, max_abs, GridSpec, PhysicalConstants, RealField};
use crate::state::UnitaryState;
use crate::unitary::unitary_current;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracerParticle {
    /// Position in `[0, L)`.
    pub x: f64,
    pub t: f64,
    /// Set once the particle meets a sign change of `B⁰`.
    pub stopped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub particles: Vec<TracerParticle>,
    /// Seed used for the initial sampling.
    pub seed: u64,
}

/// Charge density `j⁰ = −2e²B⁰φ²`.
pub fn charge_density(state: &UnitaryState, consts: &PhysicalConstants) -> RealField {
    let [rho, _] = unitary_current(state, consts);
    rho
}

fn ratio(b0: f64, b1: f64, x: f64, t: f64) -> Result<f64> {
    if b0 == 0.0 || !b0.is_finite() {
        return Err(Error::VanishingB0AtPoint { x, t });
    }
    Ok(b1 / b0)
}

/// `B¹/B⁰` at `x`, both interpolated linearly from the lattice.
pub fn guidance_velocity(state: &UnitaryState, grid: &GridSpec, x: f64) -> Result<f64> {
    state.validate(grid)?;
    let b0 = interpolate(&state.b[0], grid, x);
    let b1 = interpolate(&state.b[1], grid, x);
    ratio(b0, b1, x, state.t)
}

/// Draws `count` positions from the density `|w|`, taken as piecewise
/// constant on the cells `[x_i − dx/2, x_i + dx/2)`. Jittered stratified
/// sampling: particle `k` takes the quantile `(k + U_k)/count`.
pub fn sample_ensemble(weights: &[f64], grid: &GridSpec, count: usize, seed: u64) -> Result<Ensemble> {
    grid.check(weights)?;
    let cdf: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w.abs();
            Some(*acc)
        })
        .collect();
    let total = cdf[cdf.len() - 1];
    if !(total > 0.0) || count == 0 {
        return Err(Error::InvalidGrid(
            "sampling needs a nonzero density and at least one particle".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dx = grid.dx();
    let particles = (0..count)
        .map(|k| {
            let target = total * (k as f64 + rng.random::<f64>()) / count as f64;
            let i = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
            let below = if i == 0 { 0.0 } else { cdf[i - 1] };
            let frac = ((target - below) / weights[i].abs()).clamp(0.0, 1.0);
            TracerParticle {
                x: grid.wrap(grid.x(i) - 0.5 * dx + frac * dx),
                t: 0.0,
                stopped: false,
            }
        })
        .collect();
    Ok(Ensemble { particles, seed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopEvent {
    pub particle: usize,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Advection {
    pub final_ensemble: Ensemble,
    /// Positions at every slice time, `positions[slice][particle]`.
    pub positions: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    /// `max |B¹/B⁰|` over the lattice, per slice.
    pub max_speed: Vec<f64>,
    pub stops: Vec<StopEvent>,
}

struct Pair<'a> {
    a: &'a UnitaryState,
    b: &'a UnitaryState,
    grid: &'a GridSpec,
}

impl Pair<'_> {
    fn fields(&self, x: f64, t: f64) -> (f64, f64) {
        let h = self.b.t - self.a.t;
        let s = if h > 0.0 { (t - self.a.t) / h } else { 0.0 };
        let at = |st: &UnitaryState, mu: usize| interpolate(&st.b[mu], self.grid, x);
        (
            (1.0 - s) * at(self.a, 0) + s * at(self.b, 0),
            (1.0 - s) * at(self.a, 1) + s * at(self.b, 1),
        )
    }

    /// RK4 over `[a.t, b.t]`. Returns `None` if `B⁰` at a stage leaves the
    /// sign it had at the start.
    fn advance(&self, x: f64) -> Result<Option<f64>> {
        let t0 = self.a.t;
        let h = self.b.t - t0;
        let sign = self.fields(x, t0).0.signum();
        let vel = |x: f64, t: f64| -> Result<Option<f64>> {
            let (b0, b1) = self.fields(x, t);
            if b0 == 0.0 || b0.signum() != sign {
                return Ok(None);
            }
            ratio(b0, b1, x, t).map(Some)
        };
        let Some(k1) = vel(x, t0)? else { return Ok(None) };
        let Some(k2) = vel(x + 0.5 * h * k1, t0 + 0.5 * h)? else {
            return Ok(None);
        };
        let Some(k3) = vel(x + 0.5 * h * k2, t0 + 0.5 * h)? else {
            return Ok(None);
        };
        let Some(k4) = vel(x + h * k3, t0 + h)? else {
            return Ok(None);
        };
        Ok(Some(
            self.grid.wrap(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)),
        ))
    }
}

/// Advects every particle through the stored slices (ordered in time,
/// starting at the ensemble time). Fields are interpolated linearly in
/// space and time. A particle that meets a sign change of `B⁰` is stopped
/// there and the event is logged.
pub fn advect_ensemble(ens: &Ensemble, slices: &[UnitaryState], grid: &GridSpec) -> Result<Advection> {
    let first = slices.first().ok_or(Error::SliceCoverage { t: f64::NAN })?;
    for s in slices {
        s.validate(grid)?;
    }
    for p in &ens.particles {
        if (p.t - first.t).abs() > 1e-12 * first.t.abs().max(1.0) {
            return Err(Error::SliceCoverage { t: p.t });
        }
    }
    let speed = |s: &UnitaryState| -> f64 {
        let v: Vec<f64> = s.b[0].iter().zip(s.b[1].iter()).map(|(b0, b1)| b1 / b0).collect();
        max_abs(&v)
    };

    let mut particles = ens.particles.clone();
    let mut positions = vec![particles.iter().map(|p| p.x).collect::<Vec<_>>()];
    let mut times = vec![first.t];
    let mut max_speed = vec![speed(first)];
    let mut stops = Vec::new();
    for w in slices.windows(2) {
        let pair = Pair {
            a: &w[0],
            b: &w[1],
            grid,
        };
        let outcome: Vec<Result<Option<f64>>> = particles
            .par_iter()
            .map(|p| {
                if p.stopped {
                    Ok(Some(p.x))
                } else {
                    pair.advance(p.x)
                }
            })
            .collect();
        for (k, (p, r)) in particles.iter_mut().zip(outcome).enumerate() {
            match r? {
                Some(x) => p.x = x,
                None => {
                    p.stopped = true;
                    stops.push(StopEvent {
                        particle: k,
                        t: w[0].t,
                        x: p.x,
                    });
                }
            }
            p.t = w[1].t;
        }
        positions.push(particles.iter().map(|p| p.x).collect());
        times.push(w[1].t);
        max_speed.push(speed(&w[1]));
    }
    Ok(Advection {
        final_ensemble: Ensemble {
            particles,
            seed: ens.seed,
        },
        positions,
        times,
        max_speed,
        stops,
    })
}

/// Normalised histogram of positions on `bins` equal bins of `[0, L)`.
pub fn position_histogram(xs: &[f64], grid: &GridSpec, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    let width = grid.length() / bins as f64;
    for &x in xs {
        let b = ((grid.wrap(x) / width) as usize).min(bins - 1);
        h[b] += 1.0;
    }
    let total = xs.len().max(1) as f64;
    h.iter_mut().for_each(|v| *v /= total);
    h
}

/// Mass of `|w|` in each bin, with `w` piecewise constant on cells
/// centred at the sites; normalised to sum 1.
pub fn density_histogram(weights: &[f64], grid: &GridSpec, bins: usize) -> Vec<f64> {
    let l = grid.length();
    let dx = grid.dx();
    let width = l / bins as f64;
    let mut h = vec![0.0; bins];
    let mut deposit = |lo: f64, hi: f64, w: f64| {
        // lo, hi in [0, L], lo < hi
        let mut a = lo;
        while a < hi {
            let b = ((a / width) as usize).min(bins - 1);
            let edge = ((b + 1) as f64 * width).min(hi);
            h[b] += w * (edge - a);
            if edge <= a {
                break;
            }
            a = edge;
        }
    };
    for (i, w) in weights.iter().enumerate() {
        let w = w.abs();
        let lo = grid.x(i) - 0.5 * dx;
        let hi = lo + dx;
        if lo < 0.0 {
            deposit(lo + l, l, w);
            deposit(0.0, hi, w);
        } else if hi > l {
            deposit(lo, l, w);
            deposit(0.0, hi - l, w);
        } else {
            deposit(lo, hi, w);
        }
    }
    let total: f64 = h.iter().sum();
    if total > 0.0 {
        h.iter_mut().for_each(|v| *v /= total);
    }
    h
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum()
}

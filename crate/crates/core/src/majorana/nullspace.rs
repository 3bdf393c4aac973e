use nalgebra::DMatrix;

use super::gamma::{FourVector, GammaSet, Spinor, METRIC};
use crate::error::{Error, Result};

/// Relative singular-value threshold for the rank decision.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Singular values within this factor of the threshold make the rank
/// ambiguous.
const AMBIGUITY_BAND: f64 = 1e2;

/// Real `8 × 4` matrix of `A ↦ ÂΨ` (real and imaginary parts stacked),
/// acting on contravariant components of `A`.
pub fn slash_operator(psi: &Spinor, g: &GammaSet) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 4);
    for mu in 0..4 {
        let col = g.gamma[mu] * psi * num_complex::Complex64::new(METRIC[mu], 0.0);
        for a in 0..4 {
            m[(a, mu)] = col[a].re;
            m[(a + 4, mu)] = col[a].im;
        }
    }
    m
}

/// Orthonormal basis of `{A real : ÂΨ = 0}`.
pub fn slash_nullspace(psi: &Spinor, g: &GammaSet) -> Result<Vec<FourVector>> {
    if psi.norm() == 0.0 {
        return Err(Error::ZeroSpinor);
    }
    let svd = slash_operator(psi, g).svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let top = sigma.iter().copied().fold(0.0, f64::max);
    let cut = RANK_THRESHOLD * top;
    if sigma
        .iter()
        .any(|&s| s > cut / AMBIGUITY_BAND && s < cut * AMBIGUITY_BAND)
    {
        return Err(Error::DegenerateSpinor {
            singular_values: sigma,
        });
    }
    Ok(sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(k, _)| FourVector(std::array::from_fn(|mu| v_t[(k, mu)])))
        .collect())
}

/// Least-squares `λ` in `j ≈ λA`, and the residual `‖j − λA‖`.
pub fn proportionality(j: &FourVector, a: &FourVector) -> (f64, f64) {
    let aa: f64 = a.0.iter().map(|v| v * v).sum();
    let ja: f64 = j.0.iter().zip(&a.0).map(|(x, y)| x * y).sum();
    let lambda = ja / aa;
    let r = (0..4)
        .map(|mu| (j.0[mu] - lambda * a.0[mu]).powi(2))
        .sum::<f64>()
        .sqrt();
    (lambda, r)
}

fn ray(theta: f64, phi: f64) -> FourVector {
    FourVector([1.0, theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
}

fn ray_residual(op: &DMatrix<f64>, a: &FourVector) -> f64 {
    let v = nalgebra::DVector::from_column_slice(&a.0);
    (op * v).norm() / a.norm()
}

/// Independent estimate of the nullspace dimension: scans future-directed
/// null rays `(1, n)` over a grid on the unit sphere, refines the best
/// candidate by a shrinking pattern search, and counts it as a null
/// direction if `‖ÂΨ‖ ≤ tol·‖A‖·‖Ψ‖`. Null directions in a real subspace
/// are at most one-dimensional, so the answer is 0 or 1.
pub fn brute_force_null_rays(psi: &Spinor, g: &GammaSet, resolution: usize, tol: f64) -> usize {
    use std::f64::consts::PI;
    let op = slash_operator(psi, g);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=resolution {
        let theta = PI * i as f64 / resolution as f64;
        for k in 0..2 * resolution {
            let phi = PI * k as f64 / resolution as f64;
            let r = ray_residual(&op, &ray(theta, phi));
            if r < best.0 {
                best = (r, theta, phi);
            }
        }
    }
    let mut step = PI / resolution as f64;
    while step > 1e-14 {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (t, p) = (best.1 + dt, best.2 + dp);
            let r = ray_residual(&op, &ray(t, p));
            if r < best.0 {
                best = (r, t, p);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    usize::from(best.0 <= tol * psi.norm())
}

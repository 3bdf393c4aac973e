//! Lattice geometry, field storage and the periodic finite-difference stencils.
//!
//! Everything lives on a uniform periodic 1+1 dimensional lattice with
//! metric signature (+,−). Contravariant components are stored; the
//! covariant ones follow from `V_0 = V^0`, `V_1 = −V^1`.

use std::ops::{Add, Deref, DerefMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest admissible number of sites.
pub const MIN_SITES: usize = 8;
/// Upper bound on `dt / dx`.
pub const MAX_COURANT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n_x: usize,
    dx: f64,
    dt: f64,
    boundary: Boundary,
}

impl GridSpec {
    pub fn new(n_x: usize, dx: f64, dt: f64) -> Result<Self> {
        if n_x < MIN_SITES {
            return Err(Error::InvalidGrid(format!(
                "n_x = {n_x} is below the minimum of {MIN_SITES}"
            )));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid(format!("dx = {dx} must be positive")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt = {dt} must be positive")));
        }
        let courant = dt / dx;
        if courant > MAX_COURANT {
            return Err(Error::InvalidGrid(format!(
                "dt/dx = {courant} violates the CFL guard dt/dx <= {MAX_COURANT}"
            )));
        }
        Ok(Self {
            n_x,
            dx,
            dt,
            boundary: Boundary::Periodic,
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Domain length `n_x * dx`.
    pub fn length(&self) -> f64 {
        self.n_x as f64 * self.dx
    }

    pub fn x(&self, site: usize) -> f64 {
        site as f64 * self.dx
    }

    pub fn coordinates(&self) -> RealField {
        Field::from_fn(self.n_x, |i| self.x(i))
    }

    /// Same domain with half the spacing and half the time step.
    pub fn refined(&self) -> Self {
        Self {
            n_x: self.n_x * 2,
            dx: self.dx / 2.0,
            dt: self.dt / 2.0,
            boundary: self.boundary,
        }
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(self.n_x, self.dx, dt)
    }

    /// Wraps a coordinate into `[0, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.length();
        let w = x.rem_euclid(l);
        if w >= l {
            0.0
        } else {
            w
        }
    }

    pub fn check<T>(&self, f: &[T]) -> Result<()> {
        if f.len() != self.n_x {
            return Err(Error::LengthMismatch {
                expected: self.n_x,
                got: f.len(),
            });
        }
        Ok(())
    }

    /// Trapezoid (= rectangle, on a periodic grid) integral.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.dx
    }

    /// Discrete `L2` norm `sqrt(sum |f|^2 dx)`.
    pub fn l2_norm(&self, f: &[f64]) -> f64 {
        (f.iter().map(|v| v * v).sum::<f64>() * self.dx).sqrt()
    }
}

/// Charge and mass, in natural units. `background` is a static, spatially
/// uniform charge density added to the source of the time component of the
/// Maxwell equation; a periodic domain only admits Gauss-law consistent data
/// when the total charge, background included, vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub e: f64,
    pub m: f64,
    pub background: f64,
}

impl PhysicalConstants {
    pub fn new(e: f64, m: f64) -> Result<Self> {
        if !e.is_finite() {
            return Err(Error::InvalidConstants(format!("e = {e} is not finite")));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidConstants(format!("m = {m} must be positive")));
        }
        Ok(Self {
            e,
            m,
            background: 0.0,
        })
    }

    pub fn with_background(mut self, background: f64) -> Self {
        self.background = background;
        self
    }

    /// `k^2 = m^2 / e^2`, the constant of the nonlinear gauge condition.
    pub fn constraint_constant(&self) -> Result<f64> {
        if self.e == 0.0 {
            return Err(Error::ZeroCharge);
        }
        Ok(self.m * self.m / (self.e * self.e))
    }

    pub(crate) fn require_charge(&self) -> Result<()> {
        if self.e == 0.0 {
            Err(Error::ZeroCharge)
        } else {
            Ok(())
        }
    }
}

/// Values a lattice field may hold.
pub trait FieldValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn is_finite_value(&self) -> bool;
}

impl FieldValue for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for Complex64 {
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// One value per lattice site.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Field<T>(Vec<T>);

pub type RealField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: FieldValue> Field<T> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![T::default(); n])
    }

    pub fn constant(n: usize, v: T) -> Self {
        Self(vec![v; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> T) -> Self {
        Self((0..n).map(f).collect())
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Field<U> {
        Field(self.0.iter().map(f).collect())
    }

    pub fn zip_map<U: Copy, V>(&self, other: &[U], mut f: impl FnMut(T, U) -> V) -> Field<V> {
        Field(self.0.iter().zip(other).map(|(&a, &b)| f(a, b)).collect())
    }

    /// First site holding a NaN or infinity.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.0.iter().position(|v| !v.is_finite_value())
    }

    /// `self + h * rate`.
    pub fn axpy(&self, h: f64, rate: &[T]) -> Self {
        Self(self.0.iter().zip(rate).map(|(&a, &b)| a + b * h).collect())
    }
}

impl<T> From<Vec<T>> for Field<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

impl<T> Deref for Field<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Field<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> FromIterator<T> for Field<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[inline]
pub(crate) fn left(i: usize, n: usize) -> usize {
    if i == 0 {
        n - 1
    } else {
        i - 1
    }
}

#[inline]
pub(crate) fn right(i: usize, n: usize) -> usize {
    if i + 1 == n {
        0
    } else {
        i + 1
    }
}

/// Second-order central difference `(f[i+1] - f[i-1]) / 2dx`, periodic.
pub fn spatial_derivative<T: FieldValue>(f: &[T], grid: &GridSpec) -> Result<Field<T>> {
    grid.check(f)?;
    Ok(central_diff(f, grid.dx()))
}

/// Three-point Laplacian `(f[i+1] - 2 f[i] + f[i-1]) / dx^2`, periodic.
pub fn laplacian_1d<T: FieldValue>(f: &[T], grid: &GridSpec) -> Result<Field<T>> {
    grid.check(f)?;
    Ok(compact_laplacian(f, grid.dx()))
}

pub(crate) fn central_diff<T: FieldValue>(f: &[T], dx: f64) -> Field<T> {
    let n = f.len();
    let s = 0.5 / dx;
    Field::from_fn(n, |i| (f[right(i, n)] - f[left(i, n)]) * s)
}

pub(crate) fn compact_laplacian<T: FieldValue>(f: &[T], dx: f64) -> Field<T> {
    let n = f.len();
    let s = 1.0 / (dx * dx);
    Field::from_fn(n, |i| (f[right(i, n)] - f[i] * 2.0 + f[left(i, n)]) * s)
}

/// Forward difference `(f[i+1] - f[i]) / dx`, periodic.
pub(crate) fn forward_diff<T: FieldValue>(f: &[T], dx: f64) -> Field<T> {
    let n = f.len();
    Field::from_fn(n, |i| (f[right(i, n)] - f[i]) * (1.0 / dx))
}

/// Periodic linear interpolation of `f` at coordinate `x`.
pub fn interpolate(f: &[f64], grid: &GridSpec, x: f64) -> f64 {
    let n = f.len();
    let s = grid.wrap(x) / grid.dx();
    let i = (s.floor() as usize).min(n - 1);
    let w = s - i as f64;
    f[i] * (1.0 - w) + f[right(i, n)] * w
}

pub(crate) fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub(crate) fn min_abs(f: &[f64]) -> f64 {
    f.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> GridSpec {
        GridSpec::new(16, 0.3, 0.1).unwrap()
    }

    proptest! {
        #[test]
        fn stencils_are_linear(
            f in prop::collection::vec(-10.0..10.0f64, 16),
            g in prop::collection::vec(-10.0..10.0f64, 16),
            a in -3.0..3.0f64,
            b in -3.0..3.0f64,
        ) {
            let grid = grid();
            let combo: RealField = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            for op in [spatial_derivative::<f64>, laplacian_1d::<f64>] {
                let lhs = op(&combo, &grid).unwrap();
                let df = op(&f, &grid).unwrap();
                let dg = op(&g, &grid).unwrap();
                for i in 0..16 {
                    let rhs = a * df[i] + b * dg[i];
                    prop_assert!((lhs[i] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) / (grid.dx() * grid.dx()));
                }
            }
        }

        #[test]
        fn summation_by_parts(
            f in prop::collection::vec(-10.0..10.0f64, 16),
            g in prop::collection::vec(-10.0..10.0f64, 16),
        ) {
            let grid = grid();
            let df = spatial_derivative(&f, &grid).unwrap();
            let dg = spatial_derivative(&g, &grid).unwrap();
            let s: f64 = (0..16).map(|i| f[i] * dg[i] + df[i] * g[i]).sum();
            prop_assert!(s.abs() < 1e-11);
        }
    }
}

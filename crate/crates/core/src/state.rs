//! Time-slice records shared by the steppers, and the fixed-step RK4 driver.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Field, FieldValue, GridSpec, RealField};

/// Complex scalar field and 4-potential (contravariant `A^0`, `A^1`) with
/// their first time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexKgmState {
    pub psi: ComplexField,
    pub psi_dot: ComplexField,
    pub a: [RealField; 2],
    pub a_dot: [RealField; 2],
    pub t: f64,
}

/// Real (signed) scalar field and unitary-gauge potential `B^mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryState {
    pub phi: RealField,
    pub phi_dot: RealField,
    pub b: [RealField; 2],
    pub b_dot: [RealField; 2],
    pub t: f64,
}

/// Potential-only Cauchy data; the matter field is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct EmOnlyState {
    pub b: [RealField; 2],
    pub b_dot: [RealField; 2],
    pub t: f64,
}

impl ComplexKgmState {
    pub fn zeros(n: usize) -> Self {
        Self {
            psi: Field::zeros(n),
            psi_dot: Field::zeros(n),
            a: [Field::zeros(n), Field::zeros(n)],
            a_dot: [Field::zeros(n), Field::zeros(n)],
            t: 0.0,
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        grid.check(&self.psi)?;
        grid.check(&self.psi_dot)?;
        for f in self.a.iter().chain(&self.a_dot) {
            grid.check(f)?;
        }
        self.check_finite()
    }

    pub fn abs_psi(&self) -> RealField {
        self.psi.map(|z| z.norm())
    }
}

impl UnitaryState {
    pub fn zeros(n: usize) -> Self {
        Self {
            phi: Field::zeros(n),
            phi_dot: Field::zeros(n),
            b: [Field::zeros(n), Field::zeros(n)],
            b_dot: [Field::zeros(n), Field::zeros(n)],
            t: 0.0,
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        for f in [&self.phi, &self.phi_dot]
            .into_iter()
            .chain(&self.b)
            .chain(&self.b_dot)
        {
            grid.check(f)?;
        }
        self.check_finite()
    }

    /// Drops the matter field, keeping the potential Cauchy data.
    pub fn to_em_only(&self) -> EmOnlyState {
        EmOnlyState {
            b: self.b.clone(),
            b_dot: self.b_dot.clone(),
            t: self.t,
        }
    }
}

impl EmOnlyState {
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        for f in self.b.iter().chain(&self.b_dot) {
            grid.check(f)?;
        }
        self.check_finite()
    }
}

/// A state that the RK4 driver can advance. Rates share the state's layout.
pub trait OdeState: Sized + Clone {
    /// `self + sum h_k * rate_k`, applied to every field and to `t`.
    fn combine(&self, terms: &[(f64, &Self)]) -> Self;
    /// First non-finite entry, as (quantity, site).
    fn non_finite(&self) -> Option<(&'static str, usize)>;
    fn time(&self) -> f64;

    fn check_finite(&self) -> Result<()> {
        match self.non_finite() {
            Some((quantity, site)) => Err(Error::NonFinite {
                quantity,
                site,
                t: self.time(),
            }),
            None => Ok(()),
        }
    }
}

fn combine_field<T: FieldValue>(base: &Field<T>, terms: &[(f64, &Field<T>)]) -> Field<T> {
    let mut out = base.clone();
    for (h, rate) in terms {
        for (o, &r) in out.iter_mut().zip(rate.iter()) {
            *o = *o + r * *h;
        }
    }
    out
}

fn first_bad<T: FieldValue>(fields: &[(&'static str, &Field<T>)]) -> Option<(&'static str, usize)> {
    fields
        .iter()
        .find_map(|(name, f)| f.first_non_finite().map(|i| (*name, i)))
}

macro_rules! pick {
    ($terms:expr, $($f:tt)+) => {
        $terms.iter().map(|(h, s)| (*h, &s.$($f)+)).collect::<Vec<_>>()
    };
}

impl OdeState for ComplexKgmState {
    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        Self {
            psi: combine_field(&self.psi, &pick!(terms, psi)),
            psi_dot: combine_field(&self.psi_dot, &pick!(terms, psi_dot)),
            a: [
                combine_field(&self.a[0], &pick!(terms, a[0])),
                combine_field(&self.a[1], &pick!(terms, a[1])),
            ],
            a_dot: [
                combine_field(&self.a_dot[0], &pick!(terms, a_dot[0])),
                combine_field(&self.a_dot[1], &pick!(terms, a_dot[1])),
            ],
            t: self.t + terms.iter().map(|(h, s)| h * s.t).sum::<f64>(),
        }
    }

    fn non_finite(&self) -> Option<(&'static str, usize)> {
        first_bad::<Complex64>(&[("psi", &self.psi), ("psi_dot", &self.psi_dot)]).or_else(|| {
            first_bad(&[
                ("A0", &self.a[0]),
                ("A1", &self.a[1]),
                ("dA0/dt", &self.a_dot[0]),
                ("dA1/dt", &self.a_dot[1]),
            ])
        })
    }

    fn time(&self) -> f64 {
        self.t
    }
}

impl OdeState for UnitaryState {
    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        Self {
            phi: combine_field(&self.phi, &pick!(terms, phi)),
            phi_dot: combine_field(&self.phi_dot, &pick!(terms, phi_dot)),
            b: [
                combine_field(&self.b[0], &pick!(terms, b[0])),
                combine_field(&self.b[1], &pick!(terms, b[1])),
            ],
            b_dot: [
                combine_field(&self.b_dot[0], &pick!(terms, b_dot[0])),
                combine_field(&self.b_dot[1], &pick!(terms, b_dot[1])),
            ],
            t: self.t + terms.iter().map(|(h, s)| h * s.t).sum::<f64>(),
        }
    }

    fn non_finite(&self) -> Option<(&'static str, usize)> {
        first_bad(&[
            ("phi", &self.phi),
            ("phi_dot", &self.phi_dot),
            ("B0", &self.b[0]),
            ("B1", &self.b[1]),
            ("dB0/dt", &self.b_dot[0]),
            ("dB1/dt", &self.b_dot[1]),
        ])
    }

    fn time(&self) -> f64 {
        self.t
    }
}

impl OdeState for EmOnlyState {
    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        Self {
            b: [
                combine_field(&self.b[0], &pick!(terms, b[0])),
                combine_field(&self.b[1], &pick!(terms, b[1])),
            ],
            b_dot: [
                combine_field(&self.b_dot[0], &pick!(terms, b_dot[0])),
                combine_field(&self.b_dot[1], &pick!(terms, b_dot[1])),
            ],
            t: self.t + terms.iter().map(|(h, s)| h * s.t).sum::<f64>(),
        }
    }

    fn non_finite(&self) -> Option<(&'static str, usize)> {
        first_bad(&[
            ("B0", &self.b[0]),
            ("B1", &self.b[1]),
            ("dB0/dt", &self.b_dot[0]),
            ("dB1/dt", &self.b_dot[1]),
        ])
    }

    fn time(&self) -> f64 {
        self.t
    }
}

/// One classical fourth-order Runge-Kutta step. `rate` returns the time
/// derivative of its argument in the state's own layout (with `t` = 1).
pub fn rk4_step<S, F>(state: &S, dt: f64, mut rate: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    let k1 = rate(state)?;
    let y2 = state.combine(&[(0.5 * dt, &k1)]);
    let k2 = rate(&y2)?;
    let y3 = state.combine(&[(0.5 * dt, &k2)]);
    let k3 = rate(&y3)?;
    let y4 = state.combine(&[(dt, &k3)]);
    let k4 = rate(&y4)?;
    let next = state.combine(&[(dt / 6.0, &k1), (dt / 3.0, &k2), (dt / 3.0, &k3), (dt / 6.0, &k4)]);
    next.check_finite()?;
    Ok(next)
}

/// Number of steps of size `dt` that reach `t_end` (rounded to nearest).
pub fn steps_to(t_end: f64, dt: f64) -> usize {
    (t_end / dt).round().max(0.0) as usize
}

//! Lattice simulator for real-valued charged fields in 1+1 dimensions.
//!
//! Conventions: metric `(+, −)`, periodic boundary, contravariant potential
//! components stored (`A⁰`, `A¹`), `ψ = e^{−iθ}φ` in the unitary gauge.
//!
//! ```
//! use nullgauge::{em_only, initial, unitary, GridSpec, PhysicalConstants};
//!
//! let grid = GridSpec::new(256, 0.1, 0.02)?;
//! let consts = PhysicalConstants::new(1.0, 1.0)?;
//! let (psi, background) = initial::packet(&grid, &consts, &Default::default())?;
//! let consts = consts.with_background(background);
//! let slice = unitary::to_unitary(&psi, &grid, &consts, 1e-8)?.unitary;
//! let em = slice.to_em_only();
//! let cfg = em_only::ReconstructionConfig::for_slice(&em, &grid, &consts)?;
//! let rebuilt = em_only::reconstruct(&em, &grid, &consts, &cfg)?;
//! assert!((rebuilt.phi_rec[0] - slice.phi[0]).abs() < 1e-12);
//! # Ok::<(), nullgauge::Error>(())
//! ```

pub mod bohm;
pub mod cli;
pub mod convergence;
pub mod dirac_flow;
pub mod em_only;
pub mod error;
pub mod grid;
pub mod initial;
pub mod kgm;
pub mod majorana;
pub mod state;
pub mod unitary;

pub use error::{Error, Result};
pub use grid::{ComplexField, Field, GridSpec, PhysicalConstants, RealField};
pub use state::{ComplexKgmState, EmOnlyState, UnitaryState};

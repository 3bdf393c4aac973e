use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the lattice steppers, the gauge transforms and the
/// spinor algebra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("operation divides by the charge, but e = 0")]
    ZeroCharge,

    #[error("non-finite {quantity} at site {site} (t = {t})")]
    NonFinite {
        quantity: &'static str,
        site: usize,
        t: f64,
    },

    #[error("scalar field has {} node site(s) below threshold {threshold:e}: {sites:?}", sites.len())]
    Node { sites: Vec<usize>, threshold: f64 },

    #[error(
        "phase mismatch across the periodic boundary is not a multiple of 2π (odd number of sign flips)"
    )]
    TopologicalObstruction,

    #[error("|B0| = {value:e} below floor {floor:e} at site {site} (t = {t})")]
    VanishingB0 {
        site: usize,
        value: f64,
        floor: f64,
        t: f64,
    },

    #[error("reconstruction radicand {value:e} below -{tolerance:e} at site {site} (t = {t})")]
    NegativeRadicand {
        site: usize,
        value: f64,
        tolerance: f64,
        t: f64,
    },

    #[error("|phi| = {value:e} below floor {floor:e} at site {site} (t = {t})")]
    VanishingPhi {
        site: usize,
        value: f64,
        floor: f64,
        t: f64,
    },

    #[error("interpolated B0 vanishes at x = {x} (t = {t})")]
    VanishingB0AtPoint { x: f64, t: f64 },

    #[error("field slices do not cover t = {t}")]
    SliceCoverage { t: f64 },

    #[error("spinor is zero")]
    ZeroSpinor,

    #[error("numerical rank is ambiguous: singular values {singular_values:?}")]
    DegenerateSpinor { singular_values: Vec<f64> },

    #[error("axial current norm {norm:e} exceeds tolerance {tolerance:e}")]
    AxialCurrentNonzero { norm: f64, tolerance: f64 },

    #[error("phase is ill-conditioned: Majorana overlap {overlap} (expected unit modulus)")]
    DegeneratePhase { overlap: f64 },

    #[error("misaligned series: {0}")]
    Misaligned(String),
}

impl Error {
    /// True for failures that indicate the evolution broke down (as opposed
    /// to bad input).
    pub fn is_breakdown(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::Node { .. }
                | Error::TopologicalObstruction
                | Error::VanishingB0 { .. }
                | Error::NegativeRadicand { .. }
                | Error::VanishingPhi { .. }
                | Error::VanishingB0AtPoint { .. }
        )
    }
}

//! Property suites run by `majorana-suite` and `verify`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::grid::{Field, RealField};
use crate::majorana::{
    anticommutator_identity, axial_current, brute_force_null_rays, dirac_current, is_majorana,
    phase_factorization, proportionality, random_majorana, random_spinor, slash_nullspace, GammaSet, Poly,
    Representation, RightSide, SpinorField, VectorField, DEFAULT_AXIAL_TOLERANCE,
};

use super::config::MajoranaSettings;

const CLIFFORD: f64 = 1e-14;
const NULL_CURRENT: f64 = 1e-12;
const NULLSPACE: f64 = 1e-10;
const IDENTITY: f64 = 1e-10;
const MUTATION: f64 = 1e-2;
const ROUND_TRIP: f64 = 1e-10;
const SCAN_RESOLUTION: usize = 24;
const SCAN_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value <= tolerance` passes.
    AtMost,
    /// `value > tolerance` passes.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub trials: usize,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64, trials: usize) -> Self {
        Self {
            name: name.into(),
            pass: value <= tolerance,
            value,
            tolerance,
            bound: Bound::AtMost,
            trials,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64, trials: usize) -> Self {
        Self {
            name: name.into(),
            pass: value > tolerance,
            value,
            tolerance,
            bound: Bound::Above,
            trials,
        }
    }
}

fn rep_name(g: &GammaSet) -> &'static str {
    match g.representation {
        Representation::Dirac => "dirac",
        Representation::Majorana => "majorana",
    }
}

/// All Majorana-algebra properties in both representations.
pub fn majorana_suite(settings: &MajoranaSettings, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    for (k, g) in [GammaSet::dirac(), GammaSet::majorana()].iter().enumerate() {
        let rep = rep_name(g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        checks.push(Check::at_most(
            format!("clifford/{rep}"),
            g.clifford_residual(),
            CLIFFORD,
            1,
        ));
        checks.push(Check::at_most(
            format!("conjugation/{rep}"),
            g.conjugation_residual(),
            CLIFFORD,
            1,
        ));

        let spinors: Vec<_> = (0..settings.spinors)
            .map(|_| random_majorana(&mut rng, g))
            .collect();
        let null = spinors
            .iter()
            .map(|psi| {
                let j = dirac_current(psi, g);
                j.square().abs() / (j.0[0] * j.0[0])
            })
            .fold(0.0, f64::max);
        checks.push(Check::at_most(
            format!("null_current/{rep}"),
            null,
            NULL_CURRENT,
            settings.spinors,
        ));

        let (mut is_null, mut parallel, mut failures) = (0.0f64, 0.0f64, 0usize);
        for psi in &spinors {
            let j = dirac_current(psi, g);
            match slash_nullspace(psi, g) {
                Ok(basis) if !basis.is_empty() => {
                    for a in &basis {
                        is_null = is_null.max(a.square().abs() / (a.norm() * a.norm()));
                        parallel = parallel.max(proportionality(&j, a).1 / (a.norm() * j.norm()));
                    }
                }
                _ => failures += 1,
            }
        }
        checks.push(Check::at_most(
            format!("nullspace_null/{rep}"),
            is_null,
            NULLSPACE,
            settings.spinors,
        ));
        checks.push(Check::at_most(
            format!("nullspace_parallel/{rep}"),
            parallel,
            NULLSPACE,
            settings.spinors,
        ));
        checks.push(Check::at_most(
            format!("nullspace_failures/{rep}"),
            failures as f64,
            0.0,
            settings.spinors,
        ));

        let disagreements = (0..settings.spot_checks)
            .filter(|&i| {
                let psi = if i % 2 == 0 {
                    random_majorana(&mut rng, g)
                } else {
                    random_spinor(&mut rng)
                };
                let dim = slash_nullspace(&psi, g).map(|b| b.len()).unwrap_or(usize::MAX);
                dim != brute_force_null_rays(&psi, g, SCAN_RESOLUTION, SCAN_TOLERANCE)
            })
            .count();
        checks.push(Check::at_most(
            format!("nullspace_brute_force/{rep}"),
            disagreements as f64,
            0.0,
            settings.spot_checks,
        ));

        let (mut residual, mut mutated) = (0.0f64, f64::INFINITY);
        for _ in 0..settings.probes {
            let psi = SpinorField(std::array::from_fn(|_| Poly::random(&mut rng, 3, false)));
            let a = VectorField(std::array::from_fn(|_| Poly::random(&mut rng, 3, true)));
            let at: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            residual = residual.max(anticommutator_identity(&psi, &a, g, &at, RightSide::Correct).relative());
            mutated = mutated
                .min(anticommutator_identity(&psi, &a, g, &at, RightSide::FlippedDerivativeTerm).relative());
        }
        checks.push(Check::at_most(
            format!("operator_identity/{rep}"),
            residual,
            IDENTITY,
            settings.probes,
        ));
        checks.push(Check::above(
            format!("identity_mutation/{rep}"),
            mutated,
            MUTATION,
            settings.probes,
        ));

        let (mut round_trip, mut accepted) = (0.0f64, 0usize);
        for phi0 in &spinors {
            let psi = phi0 * Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            match phase_factorization(&psi, g, DEFAULT_AXIAL_TOLERANCE) {
                Ok((theta, phi)) if is_majorana(&phi, g, ROUND_TRIP) => {
                    let back = phi * Complex64::from_polar(1.0, theta);
                    round_trip = round_trip.max((psi - back).norm() / psi.norm());
                }
                _ => round_trip = f64::INFINITY,
            }
            let generic = random_spinor(&mut rng);
            if axial_current(&generic, g).norm() > 0.0
                && phase_factorization(&generic, g, DEFAULT_AXIAL_TOLERANCE).is_ok()
            {
                accepted += 1;
            }
        }
        checks.push(Check::at_most(
            format!("phase_round_trip/{rep}"),
            round_trip,
            ROUND_TRIP,
            settings.spinors,
        ));
        checks.push(Check::at_most(
            format!("phase_rejects_generic/{rep}"),
            accepted as f64,
            0.0,
            settings.spinors,
        ));
    }
    checks
}

/// Injected second time derivatives must leave the time component of the
/// Maxwell operator bit-identical.
pub fn cancellation_suite(trials: usize, seed: u64) -> Vec<Check> {
    use crate::em_only::maxwell_time_component;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 64;
    let mut changed = 0usize;
    for _ in 0..trials {
        let mut field =
            |scale: f64| -> RealField { Field::from_fn(n, |_| scale * rng.random_range(-1.0..1.0)) };
        let b = [field(1.0), field(1.0)];
        let b_dot = [field(1.0), field(1.0)];
        let fake = [field(1e6), field(1e6)];
        let zero = [Field::zeros(n), Field::zeros(n)];
        let base = maxwell_time_component(&b, &b_dot, &zero, 0.1);
        let injected = maxwell_time_component(&b, &b_dot, &fake, 0.1);
        if base
            .iter()
            .zip(injected.iter())
            .any(|(x, y)| x.to_bits() != y.to_bits())
        {
            changed += 1;
        }
    }
    vec![Check::at_most("b_ddot_cancellation", changed as f64, 0.0, trials)]
}

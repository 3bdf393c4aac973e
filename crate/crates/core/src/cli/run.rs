//! Scenario execution. Every run writes its CSV series and a `manifest.json`
//! into the output directory, including runs that fail.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::bohm::{
    advect_ensemble, charge_density, density_histogram, l1_distance, position_histogram, sample_ensemble,
};
use crate::convergence::{convergence_report, Series};
use crate::dirac_flow::{
    flow_line, push_path, Potential, RapidityPotential, RelParticle, UnconstrainedPotential,
};
use crate::em_only::{
    compare_evolutions, em_only_step, reconstruct, ReconstructionConfig, DEFAULT_B0_FLOOR,
    DEFAULT_RADICAND_TOLERANCE,
};
use crate::error::Error;
use crate::grid::{max_abs, GridSpec, PhysicalConstants};
use crate::initial::{from_csv, neutralising_background, packet, plane_wave, PacketParams};
use crate::kgm::{kgm_diagnostics, kgm_step};
use crate::state::{steps_to, ComplexKgmState, UnitaryState};
use crate::unitary::{to_unitary, unitary_current, unitary_diagnostics, unitary_step};

use super::config::{Background, GridSettings, Recipe, Scenario, ScenarioConfig};
use super::suite::{majorana_suite, Bound, Check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    ConfigError,
    InvariantFailure,
    Breakdown,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::ConfigError => 1,
            Status::InvariantFailure => 2,
            Status::Breakdown => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub message: String,
    /// Slice time at which the failure occurred.
    pub t: Option<f64>,
    /// The quantity that failed (`B0`, `radicand`, ...).
    pub quantity: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub status: Status,
    pub checks: Vec<Check>,
    pub summary: BTreeMap<String, Value>,
    pub failure: Option<Failure>,
    pub files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: Option<&'a str>,
    pub seed: Option<u64>,
    pub status: Status,
    pub exit_code: i32,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub config: &'a BTreeMap<String, String>,
    pub summary: &'a BTreeMap<String, Value>,
    pub checks: &'a [Check],
    pub failure: Option<&'a Failure>,
    pub errors: &'a [String],
    pub files: &'a [String],
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub const MANIFEST: &str = "manifest.json";

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(manifest).map_err(std::io::Error::other)?;
    std::fs::write(dir.join(MANIFEST), text + "\n")
}

enum Stop {
    Breakdown(Failure),
    Input(String),
}

fn quantity(err: &Error) -> &'static str {
    match err {
        Error::NonFinite { quantity, .. } => quantity,
        Error::Node { .. } => "|psi|",
        Error::TopologicalObstruction => "phase",
        Error::VanishingB0 { .. } | Error::VanishingB0AtPoint { .. } => "B0",
        Error::NegativeRadicand { .. } => "radicand",
        Error::VanishingPhi { .. } => "phi",
        _ => "input",
    }
}

fn error_time(err: &Error) -> Option<f64> {
    match err {
        Error::NonFinite { t, .. }
        | Error::VanishingB0 { t, .. }
        | Error::NegativeRadicand { t, .. }
        | Error::VanishingPhi { t, .. }
        | Error::VanishingB0AtPoint { t, .. } => Some(*t),
        _ => None,
    }
}

/// Classifies a library error raised while working on the slice at `t`.
fn stop(err: Error, t: f64) -> Stop {
    if err.is_breakdown() {
        Stop::Breakdown(Failure {
            quantity: quantity(&err).to_owned(),
            t: Some(error_time(&err).unwrap_or(t)),
            message: err.to_string(),
        })
    } else {
        Stop::Input(err.to_string())
    }
}

fn io(e: impl std::fmt::Display) -> Stop {
    Stop::Input(e.to_string())
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    out: PathBuf,
    files: Vec<String>,
    summary: BTreeMap<String, Value>,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    fn table(&mut self, name: &str, header: &[&str]) -> Result<csv::Writer<File>, Stop> {
        let mut w = csv::Writer::from_path(self.out.join(name)).map_err(io)?;
        w.write_record(header).map_err(io)?;
        self.files.push(name.to_owned());
        Ok(w)
    }

    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_owned(), value.into());
    }

    fn grid(&self) -> GridSpec {
        self.cfg.grid.as_ref().expect("lattice scenario").spec()
    }

    fn t_end(&self) -> f64 {
        self.cfg.grid.as_ref().expect("lattice scenario").t_end
    }

    fn physics(&self) -> PhysicalConstants {
        self.cfg.physics.expect("physics section")
    }

    fn sampled(&self, k: usize, last: usize) -> bool {
        k % self.cfg.every == 0 || k == last
    }
}

fn row(w: &mut csv::Writer<File>, values: &[f64]) -> Result<(), Stop> {
    w.write_record(values.iter().map(|v| format!("{v:e}")))
        .map_err(io)
}

fn relative_drift(q0: f64, q: f64) -> f64 {
    if q0 != 0.0 {
        ((q - q0) / q0).abs()
    } else {
        (q - q0).abs()
    }
}

/// Complex initial data and the constants (with the background resolved).
fn initial_complex(
    cfg: &ScenarioConfig,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<(ComplexKgmState, PhysicalConstants), Stop> {
    let init = &cfg.initial;
    let (state, auto) = match init.recipe {
        Recipe::Packet => {
            let p = PacketParams {
                phi0: init.phi0,
                amplitude: init.amplitude,
                width: init.width,
                chirp: init.chirp,
                kick: init.kick,
            };
            packet(grid, consts, &p).map_err(|e| stop(e, 0.0))?
        }
        Recipe::PlaneWave => {
            let s = plane_wave(grid, consts, init.amplitude, init.mode);
            let bg = neutralising_background(&s, grid, consts).map_err(|e| stop(e, 0.0))?;
            (s, bg)
        }
        Recipe::Csv => {
            let s = from_csv(Path::new(&init.path), grid).map_err(Stop::Input)?;
            let bg = neutralising_background(&s, grid, consts).map_err(|e| stop(e, 0.0))?;
            (s, bg)
        }
        Recipe::Zero => (ComplexKgmState::zeros(grid.n_x()), 0.0),
    };
    let background = match cfg.background {
        Background::Auto => auto,
        Background::Value(v) => v,
    };
    Ok((state, consts.with_background(background)))
}

fn initial_unitary(ctx: &mut Ctx) -> Result<(UnitaryState, GridSpec, PhysicalConstants), Stop> {
    let grid = ctx.grid();
    let (complex, consts) = initial_complex(ctx.cfg, &grid, &ctx.physics())?;
    let gt =
        to_unitary(&complex, &grid, &consts, ctx.cfg.tolerances.node_threshold).map_err(|e| stop(e, 0.0))?;
    ctx.note("background", consts.background);
    ctx.note("winding", gt.winding);
    ctx.note("sign_flips", gt.flipped_sites.len());
    Ok((gt.unitary, grid, consts))
}

fn reconstruction_config(
    ctx: &Ctx,
    state: &UnitaryState,
    grid: &GridSpec,
    consts: &PhysicalConstants,
) -> Result<ReconstructionConfig, Stop> {
    let base =
        ReconstructionConfig::for_slice(&state.to_em_only(), grid, consts).map_err(|e| stop(e, state.t))?;
    let tol = &ctx.cfg.tolerances;
    Ok(ReconstructionConfig {
        b0_floor: base.b0_floor / DEFAULT_B0_FLOOR * tol.b0_floor,
        radicand_tolerance: base.radicand_tolerance / DEFAULT_RADICAND_TOLERANCE * tol.radicand,
    })
}

fn charge_check(ctx: &mut Ctx, q0: f64, q: f64) {
    ctx.note("charge_initial", q0);
    ctx.note("charge_final", q);
    let drift = relative_drift(q0, q);
    ctx.checks.push(Check::at_most(
        "charge_drift",
        drift,
        ctx.cfg.tolerances.charge_drift,
        1,
    ));
}

fn run_kgm(ctx: &mut Ctx) -> Result<(), Stop> {
    let grid = ctx.grid();
    let (mut s, consts) = initial_complex(ctx.cfg, &grid, &ctx.physics())?;
    ctx.note("background", consts.background);
    let mut w = ctx.table(
        "series.csv",
        &[
            "t",
            "charge",
            "energy",
            "lorenz_residual_max",
            "current_divergence_max",
            "psi_max_abs",
        ],
    )?;
    let steps = steps_to(ctx.t_end(), grid.dt());
    let diag = |s: &ComplexKgmState| kgm_diagnostics(s, &grid, &consts).map_err(|e| stop(e, s.t));
    let d0 = diag(&s)?;
    let write = |w: &mut csv::Writer<File>, s: &ComplexKgmState, d: &crate::kgm::KgmDiagnostics| {
        row(
            w,
            &[
                s.t,
                d.total_charge,
                d.energy,
                d.lorenz_residual_max,
                d.current_divergence_max,
                max_abs(&s.abs_psi()),
            ],
        )
    };
    write(&mut w, &s, &d0)?;
    let mut last = d0;
    for k in 1..=steps {
        s = kgm_step(&s, &grid, &consts).map_err(|e| stop(e, s.t))?;
        if ctx.sampled(k, steps) {
            last = diag(&s)?;
            write(&mut w, &s, &last)?;
        }
    }
    w.flush().map_err(io)?;
    ctx.note("steps", steps);
    ctx.note("energy_initial", d0.energy);
    ctx.note("energy_final", last.energy);
    charge_check(ctx, d0.total_charge, last.total_charge);
    Ok(())
}

fn run_unitary(ctx: &mut Ctx) -> Result<(), Stop> {
    let (mut s, grid, consts) = initial_unitary(ctx)?;
    let mut w = ctx.table(
        "series.csv",
        &[
            "t",
            "charge",
            "energy",
            "gauss_residual_max",
            "conservation_residual_max",
            "b0_min_abs",
            "phi_min_abs",
        ],
    )?;
    let steps = steps_to(ctx.t_end(), grid.dt());
    let diag = |s: &UnitaryState| unitary_diagnostics(s, &grid, &consts).map_err(|e| stop(e, s.t));
    let write = |w: &mut csv::Writer<File>, s: &UnitaryState, d: &crate::unitary::UnitaryDiagnostics| {
        row(
            w,
            &[
                s.t,
                d.total_charge,
                d.energy,
                d.gauss_residual_max,
                d.conservation_residual_max,
                d.b0_min_abs,
                d.phi_min_abs,
            ],
        )
    };
    let d0 = diag(&s)?;
    write(&mut w, &s, &d0)?;
    let mut last = d0;
    for k in 1..=steps {
        s = unitary_step(&s, &grid, &consts).map_err(|e| stop(e, s.t))?;
        if ctx.sampled(k, steps) {
            last = diag(&s)?;
            write(&mut w, &s, &last)?;
        }
    }
    w.flush().map_err(io)?;
    ctx.note("steps", steps);
    ctx.note("energy_initial", d0.energy);
    ctx.note("energy_final", last.energy);
    ctx.note("gauss_residual_final", last.gauss_residual_max);
    charge_check(ctx, d0.total_charge, last.total_charge);
    Ok(())
}

fn run_em_only(ctx: &mut Ctx) -> Result<(), Stop> {
    let (initial, grid, consts) = initial_unitary(ctx)?;
    let rcfg = reconstruction_config(ctx, &initial, &grid, &consts)?;
    let mut em = initial.to_em_only();
    let mut w = ctx.table(
        "series.csv",
        &[
            "t",
            "charge",
            "radicand_min",
            "b0_min_abs",
            "phi_rec_max",
            "l2_B0",
            "l2_B1",
        ],
    )?;
    let e2 = consts.e * consts.e;
    let sample = |em: &crate::state::EmOnlyState| -> Result<[f64; 7], Stop> {
        let r = reconstruct(em, &grid, &consts, &rcfg).map_err(|e| stop(e, em.t))?;
        let density: Vec<f64> = (0..grid.n_x())
            .map(|i| -2.0 * e2 * em.b[0][i] * r.phi_rec[i] * r.phi_rec[i])
            .collect();
        Ok([
            em.t,
            grid.integrate(&density),
            r.radicand_min,
            r.b0_min_abs,
            max_abs(&r.phi_rec),
            grid.l2_norm(&em.b[0]),
            grid.l2_norm(&em.b[1]),
        ])
    };
    let first = sample(&em)?;
    row(&mut w, &first)?;
    let mut last = first;
    let steps = steps_to(ctx.t_end(), grid.dt());
    for k in 1..=steps {
        em = em_only_step(&em, &grid, &consts, &rcfg).map_err(|e| stop(e, em.t))?;
        if ctx.sampled(k, steps) {
            last = sample(&em)?;
            row(&mut w, &last)?;
        }
    }
    w.flush().map_err(io)?;
    ctx.note("steps", steps);
    ctx.note("radicand_min_final", last[2]);
    charge_check(ctx, first[1], last[1]);
    Ok(())
}

pub const COMPARE_COLUMNS: [&str; 7] = [
    "t",
    "l2_B0",
    "l2_B1",
    "linf_B0",
    "linf_B1",
    "radicand_min",
    "b0_min_abs",
];

/// Runs both paths on `grid` and writes `file`. Returns the relative
/// divergence at the final common time.
fn compare_on(ctx: &mut Ctx, grid: &GridSpec, file: &str, every: usize) -> Result<f64, Stop> {
    let (complex, consts) = initial_complex(ctx.cfg, grid, &ctx.physics())?;
    let initial = to_unitary(&complex, grid, &consts, ctx.cfg.tolerances.node_threshold)
        .map_err(|e| stop(e, 0.0))?
        .unitary;
    let rcfg = reconstruction_config(ctx, &initial, grid, &consts)?;
    let report = compare_evolutions(&initial, grid, &consts, &rcfg, ctx.t_end()).map_err(|e| stop(e, 0.0))?;
    let mut w = ctx.table(file, &COMPARE_COLUMNS)?;
    let last = report.samples.len() - 1;
    for (k, s) in report.samples.iter().enumerate() {
        if k % every == 0 || k == last {
            row(
                &mut w,
                &[
                    s.t,
                    s.l2_b0,
                    s.l2_b1,
                    s.linf_b0,
                    s.linf_b1,
                    s.radicand_min,
                    s.b0_min_abs,
                ],
            )?;
        }
    }
    w.flush().map_err(io)?;
    if let Some(f) = report.failure {
        let t = report.samples[last].t;
        return Err(match stop(f.error, t) {
            Stop::Breakdown(mut failure) => {
                failure.message = format!("{:?} path, step {}: {}", f.path, f.step, failure.message);
                Stop::Breakdown(failure)
            }
            other => other,
        });
    }
    let s = &report.samples[last];
    let b = &report.final_unitary.b;
    let norm = grid.l2_norm(&b[0]).hypot(grid.l2_norm(&b[1]));
    let divergence = s.l2_b0.hypot(s.l2_b1);
    ctx.note("background", consts.background);
    ctx.note(
        "charge_initial",
        grid.integrate(&unitary_current(&initial, &consts)[0]),
    );
    ctx.note(
        "charge_final",
        grid.integrate(&unitary_current(&report.final_unitary, &consts)[0]),
    );
    Ok(if norm > 0.0 { divergence / norm } else { divergence })
}

fn run_compare(ctx: &mut Ctx) -> Result<(), Stop> {
    let grid = ctx.grid();
    let every = ctx.cfg.every;
    let rel = compare_on(ctx, &grid, "series.csv", every)?;
    ctx.note("steps", steps_to(ctx.t_end(), grid.dt()));
    ctx.note("relative_divergence_final", rel);
    ctx.checks.push(Check::at_most(
        "relative_divergence",
        rel,
        ctx.cfg.tolerances.divergence,
        1,
    ));
    let q0 = ctx.summary["charge_initial"].as_f64().unwrap_or(0.0);
    let q = ctx.summary["charge_final"].as_f64().unwrap_or(0.0);
    charge_check(ctx, q0, q);
    Ok(())
}

fn run_convergence(ctx: &mut Ctx) -> Result<(), Stop> {
    let base = ctx.cfg.grid.clone().expect("lattice scenario");
    let mut names = Vec::new();
    for k in 0..3usize {
        let scale = (1usize << k) as f64;
        let level = GridSettings {
            n_x: base.n_x << k,
            dx: base.dx / scale,
            dt: base.dt / scale,
            t_end: base.t_end,
        };
        let name = format!("series_{k}.csv");
        let rel = compare_on(ctx, &level.spec(), &name, ctx.cfg.every << k)?;
        ctx.note(&format!("relative_divergence_{k}"), rel);
        names.push(name);
    }
    let series: Vec<Series> = names
        .iter()
        .map(|n| Series::read_csv(&ctx.out.join(n)).map_err(Stop::Input))
        .collect::<Result<_, _>>()?;
    let orders = convergence_report([&series[0], &series[1], &series[2]]).map_err(|e| stop(e, base.t_end))?;
    let mut w = ctx.table(
        "orders.csv",
        &["column", "value_0", "value_1", "value_2", "richardson", "ratio"],
    )?;
    for o in &orders {
        let mut rec = vec![o.column.clone()];
        rec.extend([o.values[0], o.values[1], o.values[2], o.richardson, o.ratio].map(|v| format!("{v:e}")));
        w.write_record(&rec).map_err(io)?;
        if o.column == "l2_B0" || o.column == "l2_B1" {
            let name = format!("order_{}", o.column);
            if o.values.iter().all(|&v| v == 0.0) {
                ctx.checks.push(Check {
                    name,
                    pass: true,
                    value: f64::INFINITY,
                    tolerance: ctx.cfg.tolerances.min_order,
                    bound: Bound::Above,
                    trials: 3,
                });
            } else {
                let mut c = Check::above(name, o.ratio, ctx.cfg.tolerances.min_order, 3);
                c.pass = o.ratio >= ctx.cfg.tolerances.min_order;
                ctx.checks.push(c);
            }
        }
    }
    w.flush().map_err(io)?;
    Ok(())
}

fn run_bohm(ctx: &mut Ctx) -> Result<(), Stop> {
    let (initial, grid, consts) = initial_unitary(ctx)?;
    let steps = steps_to(ctx.t_end(), grid.dt());
    let mut slices = vec![initial];
    for _ in 0..steps {
        let s = slices.last().unwrap();
        let next = unitary_step(s, &grid, &consts).map_err(|e| stop(e, s.t))?;
        slices.push(next);
    }
    let bins = ctx.cfg.bohm.bins;
    let mut w = ctx.table("series.csv", &["t", "l1", "stopped", "max_speed"])?;
    let rho0 = charge_density(&slices[0], &consts);
    let final_density = density_histogram(&charge_density(&slices[steps], &consts), &grid, bins);
    let mut hist = ctx.table("histogram.csv", &["x_lo", "x_hi", "particles", "density"])?;
    let width = grid.length() / bins as f64;
    if rho0.iter().all(|&v| v == 0.0) {
        // No charge, no ensemble.
        for (k, s) in slices.iter().enumerate() {
            if ctx.sampled(k, steps) {
                row(&mut w, &[s.t, 0.0, 0.0, 0.0])?;
            }
        }
        for b in 0..bins {
            row(
                &mut hist,
                &[b as f64 * width, (b + 1) as f64 * width, 0.0, final_density[b]],
            )?;
        }
        ctx.note("particles", 0);
        ctx.checks
            .push(Check::at_most("histogram_l1", 0.0, ctx.cfg.bohm.l1, 0));
        return Ok(());
    }
    let ens =
        sample_ensemble(&rho0, &grid, ctx.cfg.bohm.particles, ctx.cfg.seed).map_err(|e| stop(e, 0.0))?;
    let adv = advect_ensemble(&ens, &slices, &grid).map_err(|e| stop(e, 0.0))?;
    let mut l1 = 0.0;
    for (k, s) in slices.iter().enumerate() {
        if ctx.sampled(k, steps) {
            let target = density_histogram(&charge_density(s, &consts), &grid, bins);
            l1 = l1_distance(&position_histogram(&adv.positions[k], &grid, bins), &target);
            let stopped = adv.stops.iter().filter(|e| e.t <= s.t).count();
            row(&mut w, &[s.t, l1, stopped as f64, adv.max_speed[k]])?;
        }
    }
    let xs: Vec<f64> = adv.final_ensemble.particles.iter().map(|p| p.x).collect();
    let particles = position_histogram(&xs, &grid, bins);
    for b in 0..bins {
        row(
            &mut hist,
            &[
                b as f64 * width,
                (b + 1) as f64 * width,
                particles[b],
                final_density[b],
            ],
        )?;
    }
    w.flush().map_err(io)?;
    hist.flush().map_err(io)?;
    ctx.note("particles", ens.particles.len());
    ctx.note("stopped", adv.stops.len());
    ctx.note("histogram_l1_final", l1);
    ctx.checks.push(Check::at_most(
        "histogram_l1",
        l1,
        ctx.cfg.bohm.l1,
        ens.particles.len(),
    ));
    Ok(())
}

fn run_dirac_flow(ctx: &mut Ctx) -> Result<(), Stop> {
    let consts = ctx.physics();
    let d = ctx.cfg.dirac.clone();
    let pot = RapidityPotential::new(&consts, d.amplitude, d.wavenumber).map_err(|e| stop(e, 0.0))?;
    let gaps = |pot: &dyn Potential| -> Result<(Vec<RelParticle>, Vec<[f64; 2]>), Stop> {
        let start = RelParticle::on_flow(pot, &consts, d.start);
        let pushed = push_path(&start, pot, &consts, d.dtau, d.steps).map_err(|e| stop(e, 0.0))?;
        let flowed = flow_line(pot, &consts, d.start, d.dtau, d.steps).map_err(|e| stop(e, 0.0))?;
        Ok((pushed, flowed))
    };
    let (pushed, flowed) = gaps(&pot)?;
    let control = UnconstrainedPotential(pot);
    let (c_pushed, c_flowed) = gaps(&control)?;

    let mut w = ctx.table(
        "series.csv",
        &[
            "tau",
            "t",
            "x",
            "p0",
            "p1",
            "flow_t",
            "flow_x",
            "position_gap",
            "momentum_gap",
            "mass_shell",
        ],
    )?;
    let (mut pos, mut mom, mut shell) = (0.0f64, 0.0f64, 0.0f64);
    for (k, (p, f)) in pushed.iter().zip(&flowed).enumerate() {
        let a = pot.value(f[0], f[1]);
        let pg = (p.x[0] - f[0]).abs().max((p.x[1] - f[1]).abs());
        let mg = (p.p[0] + consts.e * a[0])
            .abs()
            .max((p.p[1] + consts.e * a[1]).abs());
        let ms = p.mass_shell_residual(&consts).abs();
        pos = pos.max(pg);
        mom = mom.max(mg);
        shell = shell.max(ms);
        if ctx.sampled(k, d.steps) {
            row(
                &mut w,
                &[p.tau, p.x[0], p.x[1], p.p[0], p.p[1], f[0], f[1], pg, mg, ms],
            )?;
        }
    }
    w.flush().map_err(io)?;
    let control_gap = c_pushed
        .iter()
        .zip(&c_flowed)
        .map(|(p, f)| (p.x[0] - f[0]).abs().max((p.x[1] - f[1]).abs()))
        .fold(0.0, f64::max);
    ctx.note("steps", d.steps);
    ctx.note("control_gap", control_gap);
    ctx.checks
        .push(Check::at_most("position_gap", pos, d.agreement, d.steps));
    ctx.checks
        .push(Check::at_most("momentum_gap", mom, d.agreement, d.steps));
    ctx.checks
        .push(Check::at_most("mass_shell", shell, d.mass_shell, d.steps));
    ctx.checks.push(Check::above(
        "control_divergence",
        control_gap,
        d.control,
        d.steps,
    ));
    Ok(())
}

fn run_majorana(ctx: &mut Ctx) -> Result<(), Stop> {
    let checks = majorana_suite(&ctx.cfg.majorana, ctx.cfg.seed);
    let mut w = ctx.table(
        "suite.csv",
        &[
            "property",
            "representation",
            "trials",
            "max_residual",
            "tolerance",
            "bound",
            "pass",
        ],
    )?;
    for c in &checks {
        let (property, rep) = c.name.split_once('/').unwrap_or((&c.name, ""));
        let bound = match c.bound {
            Bound::AtMost => "at_most",
            Bound::Above => "above",
        };
        w.write_record([
            property,
            rep,
            &c.trials.to_string(),
            &format!("{:e}", c.value),
            &format!("{:e}", c.tolerance),
            bound,
            if c.pass { "true" } else { "false" },
        ])
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    ctx.checks.extend(checks);
    Ok(())
}

/// Runs the scenario, writing CSV output into `out` (which must exist).
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> RunOutcome {
    let mut ctx = Ctx {
        cfg,
        out: out.to_path_buf(),
        files: Vec::new(),
        summary: BTreeMap::new(),
        checks: Vec::new(),
    };
    let result = match cfg.scenario {
        Scenario::Kgm => run_kgm(&mut ctx),
        Scenario::Unitary => run_unitary(&mut ctx),
        Scenario::EmOnly => run_em_only(&mut ctx),
        Scenario::Compare => run_compare(&mut ctx),
        Scenario::Bohm => run_bohm(&mut ctx),
        Scenario::DiracFlow => run_dirac_flow(&mut ctx),
        Scenario::MajoranaSuite => run_majorana(&mut ctx),
        Scenario::Convergence => run_convergence(&mut ctx),
    };
    let (status, failure) = match result {
        Ok(()) => match ctx.checks.iter().find(|c| !c.pass) {
            None => (Status::Success, None),
            Some(c) => (
                Status::InvariantFailure,
                Some(Failure {
                    message: format!(
                        "check {} failed: {} vs tolerance {}",
                        c.name, c.value, c.tolerance
                    ),
                    t: cfg.grid.as_ref().map(|g| g.t_end),
                    quantity: c.name.clone(),
                }),
            ),
        },
        Err(Stop::Breakdown(f)) => (Status::Breakdown, Some(f)),
        Err(Stop::Input(message)) => (
            Status::ConfigError,
            Some(Failure {
                message,
                t: None,
                quantity: "input".into(),
            }),
        ),
    };
    RunOutcome {
        status,
        checks: ctx.checks,
        summary: ctx.summary,
        failure,
        files: ctx.files,
    }
}

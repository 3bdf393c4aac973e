//! Command implementations behind the `nullgauge` binary.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 invariant
//! failure, 3 runtime breakdown.

pub mod config;
pub mod run;
pub mod suite;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::convergence::{convergence_report, Series};
use crate::dirac_flow::{flow_line, push_path, RapidityPotential, RelParticle};
use crate::grid::PhysicalConstants;

pub use config::{parse_config, ConfigError, Scenario, ScenarioConfig};
pub use run::{run_scenario, RunManifest, RunOutcome, Status};
pub use suite::Check;

/// `run <config> [--out DIR] [--seed N] [--override k=v]...`
pub fn run_command(config: &Path, out: Option<&Path>, seed: Option<u64>, overrides: &[String]) -> i32 {
    let started = run::unix_now();
    let mut overrides = overrides.to_vec();
    if let Some(s) = seed {
        overrides.push(format!("seed={s}"));
    }
    let text = std::fs::read_to_string(config);
    let parsed = match &text {
        Ok(t) => parse_config(t, &overrides).map_err(|errs| errs.iter().map(ToString::to_string).collect()),
        Err(e) => Err(vec![format!("cannot read {}: {e}", config.display())]),
    };
    let dir: PathBuf = match (out, &parsed) {
        (Some(o), _) => o.to_path_buf(),
        (None, Ok(c)) => PathBuf::from(&c.output_dir),
        (None, Err(_)) => text
            .as_deref()
            .ok()
            .and_then(config::output_dir_hint)
            .unwrap_or_else(|| "out".into())
            .into(),
    };
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("error: cannot create output directory {}: {e}", dir.display());
        return Status::ConfigError.exit_code();
    }

    let empty = BTreeMap::new();
    let (outcome, errors, cfg) = match parsed {
        Ok(cfg) => (run_scenario(&cfg, &dir), Vec::new(), Some(cfg)),
        Err(errors) => (
            RunOutcome {
                status: Status::ConfigError,
                checks: Vec::new(),
                summary: BTreeMap::new(),
                failure: None,
                files: Vec::new(),
            },
            errors,
            None,
        ),
    };
    for e in &errors {
        eprintln!("config error: {e}");
    }
    if let Some(f) = &outcome.failure {
        match f.t {
            Some(t) => eprintln!("{:?} at t = {t} ({}): {}", outcome.status, f.quantity, f.message),
            None => eprintln!("{:?}: {}", outcome.status, f.message),
        }
    }
    for c in &outcome.checks {
        println!(
            "{} {} = {:e} (tolerance {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    let code = outcome.status.exit_code();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: cfg.as_ref().map(|c| c.scenario.name()),
        seed: cfg.as_ref().map(|c| c.seed),
        status: outcome.status,
        exit_code: code,
        started_unix: started,
        finished_unix: run::unix_now(),
        config: cfg.as_ref().map_or(&empty, |c| &c.echo),
        summary: &outcome.summary,
        checks: &outcome.checks,
        failure: outcome.failure.as_ref(),
        errors: &errors,
        files: &outcome.files,
    };
    if let Err(e) = run::write_manifest(&dir, &manifest) {
        eprintln!("error: cannot write manifest: {e}");
        return Status::ConfigError.exit_code();
    }
    code
}

pub const SUITES: [&str; 4] = ["majorana", "cancellation", "dirac-flow", "all"];

fn dirac_suite() -> Vec<Check> {
    let consts = PhysicalConstants::new(1.0, 1.0).expect("valid constants");
    let pot = RapidityPotential::new(&consts, 0.3, 1.0).expect("nonzero charge");
    let (dtau, steps) = (1e-3, 10_000);
    let start = RelParticle::on_flow(&pot, &consts, [0.0, 0.4]);
    let (Ok(pushed), Ok(flowed)) = (
        push_path(&start, &pot, &consts, dtau, steps),
        flow_line(&pot, &consts, start.x, dtau, steps),
    ) else {
        return vec![Check::at_most("dirac_paths_finite", f64::INFINITY, 0.0, steps)];
    };
    let gap = pushed
        .iter()
        .zip(&flowed)
        .map(|(p, f)| (p.x[0] - f[0]).abs().max((p.x[1] - f[1]).abs()))
        .fold(0.0, f64::max);
    let shell = pushed
        .iter()
        .map(|p| p.mass_shell_residual(&consts).abs())
        .fold(0.0, f64::max);
    vec![
        Check::at_most("position_gap", gap, 1e-6, steps),
        Check::at_most("mass_shell", shell, 1e-8, steps),
    ]
}

/// `verify <suite>`: built-in checks with default settings.
pub fn verify_command(name: &str, seed: u64) -> i32 {
    let majorana = || {
        let s = config::MajoranaSettings {
            spinors: 1000,
            probes: 100,
            spot_checks: 100,
        };
        suite::majorana_suite(&s, seed)
    };
    let checks = match name {
        "majorana" => majorana(),
        "cancellation" => suite::cancellation_suite(100, seed),
        "dirac-flow" => dirac_suite(),
        "all" => {
            let mut all = majorana();
            all.extend(suite::cancellation_suite(100, seed));
            all.extend(dirac_suite());
            all
        }
        _ => {
            eprintln!("unknown suite {name:?} (expected one of {})", SUITES.join(", "));
            return Status::ConfigError.exit_code();
        }
    };
    for c in &checks {
        println!(
            "{} {} = {:e} (tolerance {:e}, {} trials)",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance,
            c.trials
        );
    }
    if checks.iter().all(|c| c.pass) {
        Status::Success.exit_code()
    } else {
        Status::InvariantFailure.exit_code()
    }
}

/// `converge <csv1> <csv2> <csv3>`: observed orders at the final time,
/// printed as CSV.
pub fn converge_command(paths: &[PathBuf]) -> i32 {
    let series: Result<Vec<Series>, String> = paths.iter().map(|p| Series::read_csv(p)).collect();
    let report = series.and_then(|s| match s.as_slice() {
        [a, b, c] => convergence_report([a, b, c]).map_err(|e| e.to_string()),
        _ => Err(format!("expected three series, got {}", s.len())),
    });
    match report {
        Ok(orders) => {
            println!("column,value_0,value_1,value_2,richardson,ratio");
            for o in orders {
                println!(
                    "{},{:e},{:e},{:e},{:e},{:e}",
                    o.column, o.values[0], o.values[1], o.values[2], o.richardson, o.ratio
                );
            }
            Status::Success.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            Status::ConfigError.exit_code()
        }
    }
}

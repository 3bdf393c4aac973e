use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_nullgauge");

fn lattice_config(scenario: &str, recipe: &str) -> String {
    format!(
        "scenario = {scenario}\nseed = 4\n[grid]\nn_x = 64\ndx = 0.2\ndt = 0.04\nt_end = 0.4\n\
         [physics]\ne = 1\nm = 1\n[initial]\nrecipe = {recipe}\n[bohm]\nparticles = 500\nbins = 16\nl1 = 0.2\n"
    )
}

fn run(dir: &Path, name: &str, text: &str, args: &[&str]) -> (Output, PathBuf) {
    let config = dir.join(format!("{name}.ini"));
    std::fs::write(&config, text).unwrap();
    let out = dir.join(name);
    let output = Command::new(BIN)
        .arg("run")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .args(args)
        .output()
        .unwrap();
    (output, out)
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn zero_field_gives_all_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["kgm", "unitary", "em-only", "compare", "bohm"] {
        let (o, out) = run(dir.path(), scenario, &lattice_config(scenario, "zero"), &[]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{scenario}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let (header, data) = rows(&out.join("series.csv"));
        assert!(data.len() > 1);
        for r in &data {
            assert!(r[1..].iter().all(|&v| v == 0.0), "{scenario} {header:?} {r:?}");
        }
        assert_eq!(manifest(&out)["status"], "success");
    }
}

#[test]
fn compare_series_has_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(
        dir.path(),
        "c",
        &lattice_config("compare", "packet"),
        &["--override", "tolerances.divergence=1e-2"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, data) = rows(&out.join("series.csv"));
    assert_eq!(
        header,
        [
            "t",
            "l2_B0",
            "l2_B1",
            "linf_B0",
            "linf_B1",
            "radicand_min",
            "b0_min_abs"
        ]
    );
    assert_eq!(data.len(), 11);
    assert_eq!(data[0][1], 0.0);
    assert!(data[10][1] > 0.0);
}

#[test]
fn identical_seed_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = lattice_config("bohm", "packet");
    let (a, out_a) = run(dir.path(), "a", &text, &[]);
    let (b, out_b) = run(dir.path(), "b", &text, &[]);
    let (c, out_c) = run(dir.path(), "c", &text, &["--seed", "5"]);
    for o in [&a, &b, &c] {
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |p: &Path| std::fs::read(p.join("series.csv")).unwrap();
    assert_eq!(read(&out_a), read(&out_b));
    assert_ne!(read(&out_a), read(&out_c));
    assert_eq!(manifest(&out_c)["seed"], 5);
}

#[test]
fn config_errors_exit_one_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let text = lattice_config("kgm", "packet").replace("m = 1\n", "m = 1\nm = 2\n");
    let (o, out) = run(dir.path(), "dup", &text, &[]);
    assert_eq!(o.status.code(), Some(1));
    let m = manifest(&out);
    assert_eq!(m["status"], "config-error");
    let err = m["errors"][0].as_str().unwrap();
    assert!(err.contains("line 11") && err.contains("line 10"), "{err}");

    let (o, _) = run(
        dir.path(),
        "cfl",
        &lattice_config("kgm", "packet"),
        &["--override", "grid.dt=0.18"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("CFL"));

    let (o, _) = run(
        dir.path(),
        "unknown",
        &format!("{}colour = 1\n", lattice_config("kgm", "packet")),
        &[],
    );
    assert_eq!(o.status.code(), Some(1));

    let missing = Command::new(BIN)
        .args(["run", "/nonexistent/config.ini", "--out"])
        .arg(dir.path().join("missing"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(manifest(&dir.path().join("missing"))["status"], "config-error");
}

#[test]
fn invariant_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(
        dir.path(),
        "inv",
        &lattice_config("compare", "packet"),
        &["--override", "tolerances.divergence=0"],
    );
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&out);
    assert_eq!(m["status"], "invariant-failure");
    assert_eq!(m["failure"]["quantity"], "relative_divergence");
    assert!(out.join("series.csv").exists());
}

#[test]
fn breakdown_exits_three_with_time_and_quantity() {
    let dir = tempfile::tempdir().unwrap();
    // Without the background the Gauss law forces a negative radicand.
    let (o, out) = run(
        dir.path(),
        "neg",
        &lattice_config("em-only", "packet"),
        &["--override", "physics.background=0"],
    );
    assert_eq!(o.status.code(), Some(3));
    let m = manifest(&out);
    assert_eq!(m["status"], "breakdown");
    assert_eq!(m["failure"]["quantity"], "radicand");
    assert_eq!(m["failure"]["t"], 0.0);
}

#[test]
fn majorana_suite_lists_properties() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scenario = majorana-suite\n[majorana]\nspinors = 50\nprobes = 10\nspot_checks = 10\n";
    let (o, out) = run(dir.path(), "maj", text, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    let checks = m["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 22);
    for c in checks {
        assert_eq!(c["pass"], true, "{c}");
        assert!(c["value"].is_number());
    }
    assert!(checks.iter().any(|c| c["name"] == "null_current/majorana"));
    let (header, _) = {
        let mut r = csv::Reader::from_path(out.join("suite.csv")).unwrap();
        (r.headers().unwrap().clone(), ())
    };
    assert_eq!(&header[0], "property");
}

#[test]
fn dirac_flow_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        "scenario = dirac-flow\n[physics]\ne = 1\nm = 1\n[dirac]\nsteps = 2000\n[output]\nevery = 100\n";
    let (o, out) = run(dir.path(), "dirac", text, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, data) = rows(&out.join("series.csv"));
    assert_eq!(data.len(), 21);
    let (o, _) = run(dir.path(), "dirac0", &text.replace("e = 1", "e = 0"), &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_levels_converge_at_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for (k, (n, dx, dt)) in [(64, 0.2, 0.04), (128, 0.1, 0.02), (256, 0.05, 0.01)]
        .iter()
        .enumerate()
    {
        let text = format!(
            "scenario = compare\n[grid]\nn_x = {n}\ndx = {dx}\ndt = {dt}\nt_end = 0.4\n[physics]\ne = 1\nm = 1\n[tolerances]\ndivergence = 1\n"
        );
        let (o, out) = run(dir.path(), &format!("level{k}"), &text, &[]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        paths.push(out.join("series.csv"));
    }
    let o = Command::new(BIN).arg("converge").args(&paths).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().filter(|l| l.starts_with("l2_B")) {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((1.7..=2.3).contains(&ratio), "{line}");
    }

    let o = Command::new(BIN)
        .arg("converge")
        .args(&paths[..2])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn convergence_scenario_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scenario = convergence\n[grid]\nn_x = 64\ndx = 0.2\ndt = 0.04\nt_end = 0.4\n[physics]\ne = 1\nm = 1\n";
    let (o, out) = run(dir.path(), "conv", text, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let (_, orders) = {
        let mut r = csv::Reader::from_path(out.join("orders.csv")).unwrap();
        let recs: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
        ((), recs)
    };
    let l2 = orders.iter().find(|r| &r[0] == "l2_B0").unwrap();
    let ratio: f64 = l2[5].parse().unwrap();
    assert!(ratio >= 1.7, "{ratio}");
    assert_eq!(manifest(&out)["files"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_and_usage_exit_codes() {
    let ok = Command::new(BIN)
        .args(["verify", "cancellation"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("PASS"));
    let bad = Command::new(BIN).args(["verify", "nothing"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let usage = Command::new(BIN).arg("frobnicate").output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let help = Command::new(BIN).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("k.ini");
    std::fs::write(&config, lattice_config("kgm", "packet")).unwrap();
    let with = |threads: &str| {
        Command::new(BIN)
            .env("NULLGAUGE_THREADS", threads)
            .arg("run")
            .arg(&config)
            .arg("--out")
            .arg(dir.path().join(format!("t{threads}")))
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(with("2"), Some(0));
    assert_eq!(with("zero"), Some(1));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if let Err(errs) = nullgauge::cli::parse_config(&text, &[]) {
            panic!("{}: {errs:?}", path.display());
        }
        count += 1;
    }
    assert!(count >= 5);
}

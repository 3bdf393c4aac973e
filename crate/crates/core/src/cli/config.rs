//! Flat INI-style scenario configuration.
//!
//! ```text
//! scenario = compare
//! seed = 7
//! [grid]
//! n_x = 256
//! dx = 0.1
//! dt = 0.02
//! [physics]
//! e = 1
//! m = 1
//! ```
//!
//! Comments start with `#` or `;` on their own line. Keys before the first
//! section header are top-level. Every key is listed in [`KEYS`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::grid::{GridSpec, PhysicalConstants};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            column: None,
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Kgm,
    Unitary,
    EmOnly,
    Compare,
    Bohm,
    DiracFlow,
    MajoranaSuite,
    Convergence,
}

impl Scenario {
    pub const ALL: [(&'static str, Scenario); 8] = [
        ("kgm", Scenario::Kgm),
        ("unitary", Scenario::Unitary),
        ("em-only", Scenario::EmOnly),
        ("compare", Scenario::Compare),
        ("bohm", Scenario::Bohm),
        ("dirac-flow", Scenario::DiracFlow),
        ("majorana-suite", Scenario::MajoranaSuite),
        ("convergence", Scenario::Convergence),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, s)| *s == self).unwrap().0
    }

    /// Scenarios that evolve fields on the lattice.
    pub fn needs_lattice(self) -> bool {
        !matches!(self, Scenario::DiracFlow | Scenario::MajoranaSuite)
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|(n, _)| *n).collect();
                format!("unknown scenario {s:?} (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    Packet,
    PlaneWave,
    Csv,
    Zero,
}

impl FromStr for Recipe {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "packet" => Ok(Recipe::Packet),
            "plane-wave" => Ok(Recipe::PlaneWave),
            "csv" => Ok(Recipe::Csv),
            "zero" => Ok(Recipe::Zero),
            _ => Err(format!(
                "unknown recipe {s:?} (expected packet, plane-wave, csv or zero)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Background {
    /// The density the initial-data recipe needs.
    Auto,
    Value(f64),
}

struct KeySpec {
    section: &'static str,
    key: &'static str,
    /// `None` marks a key that some scenarios require.
    default: Option<&'static str>,
}

const fn key(section: &'static str, key: &'static str, default: Option<&'static str>) -> KeySpec {
    KeySpec {
        section,
        key,
        default,
    }
}

/// Every accepted key with its default.
const KEYS: &[KeySpec] = &[
    key("", "scenario", None),
    key("", "seed", Some("0")),
    key("grid", "n_x", None),
    key("grid", "dx", None),
    key("grid", "dt", None),
    key("grid", "t_end", Some("1")),
    key("physics", "e", None),
    key("physics", "m", None),
    key("physics", "background", Some("auto")),
    key("initial", "recipe", Some("packet")),
    key("initial", "phi0", Some("0.5")),
    key("initial", "amplitude", Some("0.3")),
    key("initial", "width", Some("1")),
    key("initial", "chirp", Some("0.5")),
    key("initial", "kick", Some("0.1")),
    key("initial", "mode", Some("1")),
    key("initial", "path", Some("")),
    key("output", "dir", Some("out")),
    key("output", "every", Some("1")),
    key("tolerances", "charge_drift", Some("1e-6")),
    key("tolerances", "divergence", Some("1e-3")),
    key("tolerances", "min_order", Some("1.7")),
    key("tolerances", "node_threshold", Some("1e-8")),
    key("tolerances", "b0_floor", Some("1e-6")),
    key("tolerances", "radicand", Some("1e-10")),
    key("bohm", "particles", Some("10000")),
    key("bohm", "bins", Some("64")),
    key("bohm", "l1", Some("0.05")),
    key("dirac", "amplitude", Some("0.3")),
    key("dirac", "wavenumber", Some("1")),
    key("dirac", "dtau", Some("1e-3")),
    key("dirac", "steps", Some("10000")),
    key("dirac", "t0", Some("0")),
    key("dirac", "x0", Some("0.4")),
    key("dirac", "agreement", Some("1e-6")),
    key("dirac", "mass_shell", Some("1e-8")),
    key("dirac", "control", Some("1e-2")),
    key("majorana", "spinors", Some("1000")),
    key("majorana", "probes", Some("100")),
    key("majorana", "spot_checks", Some("100")),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSettings {
    pub n_x: usize,
    pub dx: f64,
    pub dt: f64,
    pub t_end: f64,
}

impl GridSettings {
    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.n_x, self.dx, self.dt).expect("validated at parse time")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSettings {
    pub recipe: Recipe,
    pub phi0: f64,
    pub amplitude: f64,
    pub width: f64,
    pub chirp: f64,
    pub kick: f64,
    pub mode: i64,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub charge_drift: f64,
    pub divergence: f64,
    pub min_order: f64,
    pub node_threshold: f64,
    pub b0_floor: f64,
    pub radicand: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BohmSettings {
    pub particles: usize,
    pub bins: usize,
    pub l1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracSettings {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub dtau: f64,
    pub steps: usize,
    pub start: [f64; 2],
    pub agreement: f64,
    pub mass_shell: f64,
    /// Minimum divergence of the unconstrained control.
    pub control: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaSettings {
    pub spinors: usize,
    pub probes: usize,
    pub spot_checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    /// Present for lattice scenarios.
    pub grid: Option<GridSettings>,
    /// Present unless the scenario is `majorana-suite`.
    pub physics: Option<PhysicalConstants>,
    pub background: Background,
    pub initial: InitialSettings,
    pub output_dir: String,
    pub every: usize,
    pub tolerances: Tolerances,
    pub bohm: BohmSettings,
    pub dirac: DiracSettings,
    pub majorana: MajoranaSettings,
    /// Every key with its effective value, as `section.key` (top-level keys
    /// unprefixed).
    pub echo: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: Option<usize>,
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_owned()
    } else {
        format!("{section}.{key}")
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Splits the text into `section.key → (value, line)`, reporting syntax
/// errors, duplicates and unknown keys.
fn tokenize(text: &str) -> (BTreeMap<String, Entry>, Vec<ConfigError>) {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    let mut errors = Vec::new();
    let mut section = String::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let indent = raw.len() - raw.trim_start().len();
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') || body.starts_with(';') {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) if is_identifier(name.trim()) => {
                    section = name.trim().to_owned();
                    if !KEYS.iter().any(|s| s.section == section) {
                        errors.push(ConfigError::at(line, format!("unknown section [{section}]")));
                    }
                }
                _ => errors.push(ConfigError {
                    line: Some(line),
                    column: Some(indent + body.len()),
                    message: "malformed section header (expected [name])".into(),
                }),
            }
            continue;
        }
        let Some(eq) = body.find('=') else {
            errors.push(ConfigError {
                line: Some(line),
                column: Some(indent + body.len() + 1),
                message: "expected key = value".into(),
            });
            continue;
        };
        let name = body[..eq].trim();
        let value = body[eq + 1..].trim();
        if !is_identifier(name) {
            errors.push(ConfigError {
                line: Some(line),
                column: Some(indent + 1),
                message: format!("invalid key {name:?}"),
            });
            continue;
        }
        let full = qualified(&section, name);
        if !KEYS.iter().any(|s| s.section == section && s.key == name) {
            errors.push(ConfigError::at(line, format!("unknown key {full}")));
            continue;
        }
        if let Some(first) = entries.get(&full) {
            errors.push(ConfigError::at(
                line,
                format!(
                    "duplicate key {full} (first set on line {}, again on line {line})",
                    first.line.unwrap_or(0)
                ),
            ));
            continue;
        }
        entries.insert(
            full,
            Entry {
                value: value.to_owned(),
                line: Some(line),
            },
        );
    }
    (entries, errors)
}

struct Resolver {
    entries: BTreeMap<String, Entry>,
    errors: Vec<ConfigError>,
}

impl Resolver {
    fn raw(&self, name: &str) -> Option<&Entry> {
        self.entries.get(name)
    }

    fn error(&mut self, name: &str, message: String) {
        let line = self.raw(name).and_then(|e| e.line);
        self.errors.push(ConfigError {
            line,
            column: None,
            message: format!("{name}: {message}"),
        });
    }

    fn parse<T: FromStr>(&mut self, name: &str, check: impl Fn(&T) -> Result<(), String>) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let entry = self.raw(name)?.clone();
        match entry.value.parse::<T>() {
            Ok(v) => match check(&v) {
                Ok(()) => Some(v),
                Err(msg) => {
                    self.error(name, msg);
                    None
                }
            },
            Err(e) => {
                self.error(name, format!("cannot parse {:?}: {e}", entry.value));
                None
            }
        }
    }

    fn required<T: FromStr>(&mut self, name: &str, check: impl Fn(&T) -> Result<(), String>) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        if self.raw(name).is_none() {
            self.errors
                .push(ConfigError::general(format!("missing required key {name}")));
            return None;
        }
        self.parse(name, check)
    }
}

fn positive(v: &f64) -> Result<(), String> {
    if v.is_finite() && *v > 0.0 {
        Ok(())
    } else {
        Err(format!("{v} must be positive and finite"))
    }
}

fn finite(v: &f64) -> Result<(), String> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(format!("{v} must be finite"))
    }
}

fn non_negative(v: &f64) -> Result<(), String> {
    if v.is_finite() && *v >= 0.0 {
        Ok(())
    } else {
        Err(format!("{v} must be non-negative and finite"))
    }
}

fn at_least(min: usize) -> impl Fn(&usize) -> Result<(), String> {
    move |v| {
        if *v >= min {
            Ok(())
        } else {
            Err(format!("{v} is below the minimum {min}"))
        }
    }
}

fn any<T>(_: &T) -> Result<(), String> {
    Ok(())
}

/// Parses and validates a configuration. `overrides` are `key=value` pairs
/// with dotted keys (`grid.dt=0.01`) applied after the file.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let (mut entries, mut errors) = tokenize(text);
    for o in overrides {
        let Some((name, value)) = o.split_once('=') else {
            errors.push(ConfigError::general(format!("override {o:?} is not key=value")));
            continue;
        };
        let name = name.trim();
        let (section, key) = name.rsplit_once('.').unwrap_or(("", name));
        if !KEYS.iter().any(|s| s.section == section && s.key == key) {
            errors.push(ConfigError::general(format!("override of unknown key {name}")));
            continue;
        }
        entries.insert(
            name.to_owned(),
            Entry {
                value: value.trim().to_owned(),
                line: None,
            },
        );
    }
    for spec in KEYS {
        if let Some(d) = spec.default {
            entries.entry(qualified(spec.section, spec.key)).or_insert(Entry {
                value: d.to_owned(),
                line: None,
            });
        }
    }
    let mut r = Resolver { entries, errors };

    let scenario = r.required::<Scenario>("scenario", any);
    let seed = r.parse::<u64>("seed", any).unwrap_or(0);
    let lattice = scenario.is_none_or(|s| s.needs_lattice());
    let grid = if lattice {
        let n_x = r.required::<usize>("grid.n_x", at_least(crate::grid::MIN_SITES));
        let dx = r.required::<f64>("grid.dx", positive);
        let dt = r.required::<f64>("grid.dt", positive);
        let t_end = r.parse::<f64>("grid.t_end", non_negative);
        match (n_x, dx, dt, t_end) {
            (Some(n_x), Some(dx), Some(dt), Some(t_end)) => match GridSpec::new(n_x, dx, dt) {
                Ok(_) => Some(GridSettings { n_x, dx, dt, t_end }),
                Err(e) => {
                    let line = r.raw("grid.dt").and_then(|e| e.line);
                    r.errors.push(ConfigError {
                        line,
                        column: None,
                        message: e.to_string(),
                    });
                    None
                }
            },
            _ => None,
        }
    } else {
        None
    };
    let physics = if scenario != Some(Scenario::MajoranaSuite) {
        let e = r.required::<f64>("physics.e", finite);
        let m = r.required::<f64>("physics.m", positive);
        e.zip(m).and_then(|(e, m)| PhysicalConstants::new(e, m).ok())
    } else {
        None
    };
    let background = match r.raw("physics.background").map(|e| e.value.clone()) {
        Some(v) if v == "auto" => Background::Auto,
        _ => r
            .parse::<f64>("physics.background", finite)
            .map_or(Background::Auto, Background::Value),
    };
    let recipe = r.parse::<Recipe>("initial.recipe", any).unwrap_or(Recipe::Packet);
    let path = r.raw("initial.path").map(|e| e.value.clone()).unwrap_or_default();
    if recipe == Recipe::Csv && path.is_empty() {
        r.errors
            .push(ConfigError::general("initial.path is required for recipe = csv"));
    }
    let initial = InitialSettings {
        recipe,
        phi0: r.parse("initial.phi0", positive).unwrap_or(0.5),
        amplitude: r.parse("initial.amplitude", finite).unwrap_or(0.0),
        width: r.parse("initial.width", positive).unwrap_or(1.0),
        chirp: r.parse("initial.chirp", finite).unwrap_or(0.0),
        kick: r.parse("initial.kick", finite).unwrap_or(0.0),
        mode: r.parse("initial.mode", any).unwrap_or(1),
        path,
    };
    let output_dir = r.raw("output.dir").map(|e| e.value.clone()).unwrap_or_default();
    if output_dir.is_empty() {
        r.errors
            .push(ConfigError::general("output.dir must not be empty"));
    }
    let every = r.parse("output.every", at_least(1)).unwrap_or(1);
    let tolerances = Tolerances {
        charge_drift: r.parse("tolerances.charge_drift", non_negative).unwrap_or(0.0),
        divergence: r.parse("tolerances.divergence", non_negative).unwrap_or(0.0),
        min_order: r.parse("tolerances.min_order", finite).unwrap_or(0.0),
        node_threshold: r.parse("tolerances.node_threshold", non_negative).unwrap_or(0.0),
        b0_floor: r.parse("tolerances.b0_floor", non_negative).unwrap_or(0.0),
        radicand: r.parse("tolerances.radicand", non_negative).unwrap_or(0.0),
    };
    let bohm = BohmSettings {
        particles: r.parse("bohm.particles", at_least(1)).unwrap_or(1),
        bins: r.parse("bohm.bins", at_least(1)).unwrap_or(1),
        l1: r.parse("bohm.l1", non_negative).unwrap_or(0.0),
    };
    let dirac = DiracSettings {
        amplitude: r.parse("dirac.amplitude", finite).unwrap_or(0.0),
        wavenumber: r.parse("dirac.wavenumber", finite).unwrap_or(0.0),
        dtau: r.parse("dirac.dtau", positive).unwrap_or(1e-3),
        steps: r.parse("dirac.steps", at_least(1)).unwrap_or(1),
        start: [
            r.parse("dirac.t0", finite).unwrap_or(0.0),
            r.parse("dirac.x0", finite).unwrap_or(0.0),
        ],
        agreement: r.parse("dirac.agreement", non_negative).unwrap_or(0.0),
        mass_shell: r.parse("dirac.mass_shell", non_negative).unwrap_or(0.0),
        control: r.parse("dirac.control", non_negative).unwrap_or(0.0),
    };
    let majorana = MajoranaSettings {
        spinors: r.parse("majorana.spinors", at_least(1)).unwrap_or(1),
        probes: r.parse("majorana.probes", at_least(1)).unwrap_or(1),
        spot_checks: r.parse("majorana.spot_checks", at_least(1)).unwrap_or(1),
    };

    if !r.errors.is_empty() {
        r.errors.sort_by_key(|e| (e.line.is_none(), e.line));
        return Err(r.errors);
    }
    let echo = r
        .entries
        .iter()
        .map(|(k, v)| (k.clone(), v.value.clone()))
        .collect();
    Ok(ScenarioConfig {
        scenario: scenario.expect("checked above"),
        seed,
        grid,
        physics,
        background,
        initial,
        output_dir,
        every,
        tolerances,
        bohm,
        dirac,
        majorana,
        echo,
    })
}

/// Best-effort output directory of a config that failed to parse.
pub fn output_dir_hint(text: &str) -> Option<String> {
    let (entries, _) = tokenize(text);
    entries
        .get("output.dir")
        .map(|e| e.value.clone())
        .filter(|v| !v.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "scenario = kgm\n[grid]\nn_x = 256\ndx = 0.1\ndt = 0.02\n[physics]\ne = 1\nm = 1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL, &[]).unwrap();
        assert_eq!(c.scenario, Scenario::Kgm);
        let g = c.grid.unwrap();
        assert_eq!((g.n_x, g.dx, g.dt, g.t_end), (256, 0.1, 0.02, 1.0));
        assert_eq!(c.seed, 0);
        assert_eq!(c.background, Background::Auto);
        assert_eq!(c.initial.recipe, Recipe::Packet);
        assert_eq!(c.output_dir, "out");
        assert_eq!(c.tolerances.charge_drift, 1e-6);
        assert_eq!(c.bohm.particles, 10_000);
        assert_eq!(c.echo["grid.t_end"], "1");
    }

    #[test]
    fn cfl_violation_is_explained() {
        let text = MINIMAL.replace("dt = 0.02", "dt = 0.09");
        let errs = parse_config(&text, &[]).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, Some(5));
        assert!(errs[0].message.contains("CFL"), "{}", errs[0]);
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let text = format!("{MINIMAL}m = 2\n");
        let errs = parse_config(&text, &[]).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, Some(9));
        assert!(errs[0].message.contains("line 8") && errs[0].message.contains("line 9"));
    }

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        let text = format!("{MINIMAL}colour = red\n[extras]\n");
        let errs = parse_config(&text, &[]).unwrap_err();
        let msgs: Vec<String> = errs.iter().map(ToString::to_string).collect();
        assert!(
            msgs[0].starts_with("line 9: unknown key physics.colour"),
            "{msgs:?}"
        );
        assert!(msgs[1].starts_with("line 10: unknown section"), "{msgs:?}");
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let errs = parse_config("scenario = kgm\n  junk\n[grid\n", &[]).unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (Some(2), Some(7)));
        assert_eq!(errs[1].line, Some(3));
        assert!(errs[1].column.is_some());
    }

    #[test]
    fn out_of_range_values() {
        let text = MINIMAL.replace("n_x = 256", "n_x = 3").replace("m = 1", "m = -1");
        let errs = parse_config(&text, &[]).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| e.line == Some(3) && e.message.contains("minimum")));
        assert!(errs
            .iter()
            .any(|e| e.line == Some(8) && e.message.contains("positive")));
    }

    #[test]
    fn missing_required_keys() {
        let errs = parse_config("scenario = unitary\n", &[]).unwrap_err();
        let names: Vec<&str> = errs.iter().map(|e| e.message.as_str()).collect();
        for k in ["grid.n_x", "grid.dx", "grid.dt", "physics.e", "physics.m"] {
            assert!(names.iter().any(|m| m.contains(k)), "{k} in {names:?}");
        }
    }

    #[test]
    fn overrides_replace_values() {
        let c = parse_config(
            MINIMAL,
            &[
                "grid.dt=0.01".into(),
                "seed=9".into(),
                "physics.background=0.5".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.grid.unwrap().dt, 0.01);
        assert_eq!(c.seed, 9);
        assert_eq!(c.background, Background::Value(0.5));
        assert!(parse_config(MINIMAL, &["grid.colour=1".into()]).is_err());
    }

    #[test]
    fn non_lattice_scenarios_skip_grid() {
        let c = parse_config("scenario = majorana-suite\n", &[]).unwrap();
        assert!(c.grid.is_none() && c.physics.is_none());
        let c = parse_config("scenario = dirac-flow\n[physics]\ne = 1\nm = 1\n", &[]).unwrap();
        assert!(c.grid.is_none() && c.physics.is_some());
    }

    #[test]
    fn csv_recipe_needs_a_path() {
        let text = format!("{MINIMAL}[initial]\nrecipe = csv\n");
        assert!(parse_config(&text, &[]).is_err());
    }
}

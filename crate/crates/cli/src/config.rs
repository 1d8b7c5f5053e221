//! Line-oriented `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use pspec_core::pspectral::{PExponent, RadialProblem, SolverOptions, P_MAX, P_MIN};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error("{key}: {msg}")]
    Invalid { key: String, msg: String },
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Mesh,
    Eigen,
    Symmetrize,
    Verify,
    Sweep,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Mesh => "mesh",
            Command::Eigen => "eigen",
            Command::Symmetrize => "symmetrize",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Oracle => "oracle",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Command::Mesh, Command::Eigen, Command::Symmetrize, Command::Verify, Command::Sweep, Command::Oracle]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Icosphere,
    Ellipsoid,
    Circle,
    Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub kind: MeshKind,
    pub level: usize,
    pub segments: usize,
    pub aspect: f64,
    pub normalize: bool,
    /// Sphere or circle radius, interval length.
    pub radius: f64,
}

impl MeshSpec {
    pub fn is_closed(&self) -> bool {
        self.kind != MeshKind::Interval
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Closed,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// The height coordinate.
    Z,
    /// Its positive part.
    ZPositive,
    /// First random smooth field of the battery.
    Smooth,
    /// First random bump field on the Dirichlet cap.
    Bump,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub mesh: MeshSpec,
    pub problem: ProblemKind,
    /// Dirichlet domains are `{z > z0}` on surfaces and `{y > z0}` on the circle.
    pub domain_z0: f64,
    pub p: Vec<PExponent<f64>>,
    pub solver: SolverOptions<f64>,
    pub output: PathBuf,
    pub seed: u64,
    pub aspects: Vec<f64>,
    pub battery_fields: usize,
    pub battery_thresholds: usize,
    pub oracle_n: usize,
    pub oracle_problem: RadialProblem,
    pub field: FieldKind,
    pub levels: usize,
    /// Every key with its effective value, defaults included.
    pub entries: BTreeMap<String, String>,
}

/// Known keys and their defaults; `None` marks a required key.
const KEYS: &[(&str, Option<&str>)] = &[
    ("command", None),
    ("mesh.kind", Some("icosphere")),
    ("mesh.level", Some("4")),
    ("mesh.segments", Some("256")),
    ("mesh.aspect", Some("1.0")),
    ("mesh.normalize", Some("true")),
    ("mesh.radius", Some("1.0")),
    ("problem", Some("auto")),
    ("domain.z0", Some("0.0")),
    ("p", Some("2")),
    ("solver.tol", Some("1e-9")),
    ("solver.window", Some("10")),
    ("solver.max_iter", Some("50000")),
    ("solver.p_step", Some("0.25")),
    ("solver.stage_tol", Some("1e-6")),
    ("output", Some("out")),
    ("seed", Some("0")),
    ("sweep.aspects", Some("1.0, 1.05, 1.1, 1.15, 1.2")),
    ("battery.fields", Some("20")),
    ("battery.thresholds", Some("2")),
    ("oracle.n", Some("2")),
    ("oracle.problem", Some("hemisphere")),
    ("symmetrize.field", Some("z+")),
    ("symmetrize.levels", Some("256")),
];

/// Splits the text into `key -> (line, value)`, rejecting malformed lines,
/// unknown keys and duplicates.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Malformed { line, text: raw.to_string() });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Malformed { line, text: raw.to_string() });
        }
        if !KEYS.iter().any(|(name, _)| *name == k) {
            return Err(ConfigError::UnknownKey { line, key: k.to_string() });
        }
        if out.insert(k.to_string(), (line, v.to_string())).is_some() {
            return Err(ConfigError::Duplicate { line, key: k.to_string() });
        }
    }
    Ok(out)
}

/// Parses and validates a configuration file, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    validate(parse_pairs(text)?)
}

fn invalid(key: &str, msg: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), msg: msg.to_string() }
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e| invalid(key, format!("{v:?}: {e}")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| number::<f64>(key, s.trim())).collect()
}

fn positive(key: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(key, format!("{x} must be positive")))
    }
}

/// Builds a [`RunConfig`] from parsed pairs.
pub fn validate(pairs: BTreeMap<String, (usize, String)>) -> Result<RunConfig> {
    let mut entries = BTreeMap::new();
    for (key, default) in KEYS {
        let value = match (pairs.get(*key), default) {
            (Some((_, v)), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(ConfigError::Missing(key)),
        };
        entries.insert(key.to_string(), value);
    }
    let get = |k: &str| entries[k].as_str();

    let command = Command::parse(get("command"))
        .ok_or_else(|| invalid("command", format!("{:?} is not one of mesh, eigen, symmetrize, verify, sweep, oracle", get("command"))))?;
    let kind = match get("mesh.kind") {
        "icosphere" => MeshKind::Icosphere,
        "ellipsoid" => MeshKind::Ellipsoid,
        "circle" => MeshKind::Circle,
        "interval" => MeshKind::Interval,
        other => return Err(invalid("mesh.kind", format!("{other:?} is not one of icosphere, ellipsoid, circle, interval"))),
    };
    let normalize = match get("mesh.normalize") {
        "true" => true,
        "false" => false,
        other => return Err(invalid("mesh.normalize", format!("{other:?} is not true or false"))),
    };
    let mesh = MeshSpec {
        kind,
        level: number("mesh.level", get("mesh.level"))?,
        segments: number("mesh.segments", get("mesh.segments"))?,
        aspect: number("mesh.aspect", get("mesh.aspect"))?,
        normalize,
        radius: positive("mesh.radius", number("mesh.radius", get("mesh.radius"))?)?,
    };
    let problem = match get("problem") {
        "auto" if mesh.is_closed() => ProblemKind::Closed,
        "auto" | "dirichlet" => ProblemKind::Dirichlet,
        "closed" if mesh.is_closed() => ProblemKind::Closed,
        "closed" => return Err(invalid("problem", "closed problems need a closed mesh")),
        other => return Err(invalid("problem", format!("{other:?} is not one of auto, closed, dirichlet"))),
    };
    let p = list("p", get("p"))?
        .into_iter()
        .map(|x| PExponent::new(x).map_err(|_| invalid("p", format!("{x} outside the exponent range [{P_MIN}, {P_MAX}]"))))
        .collect::<Result<Vec<_>>>()?;
    let defaults = SolverOptions::<f64>::default();
    let solver = SolverOptions {
        tol: positive("solver.tol", number("solver.tol", get("solver.tol"))?)?,
        window: number("solver.window", get("solver.window"))?,
        max_iter: number("solver.max_iter", get("solver.max_iter"))?,
        p_step: positive("solver.p_step", number("solver.p_step", get("solver.p_step"))?)?,
        stage_tol: positive("solver.stage_tol", number("solver.stage_tol", get("solver.stage_tol"))?)?,
        ..defaults
    };
    if solver.window == 0 || solver.max_iter == 0 {
        return Err(invalid("solver", "window and max_iter must be positive"));
    }
    let aspects = list("sweep.aspects", get("sweep.aspects"))?;
    let oracle_problem = match get("oracle.problem") {
        "hemisphere" => RadialProblem::Hemisphere,
        "interval" => RadialProblem::Interval,
        other => return Err(invalid("oracle.problem", format!("{other:?} is not hemisphere or interval"))),
    };
    let field = match get("symmetrize.field") {
        "z" => FieldKind::Z,
        "z+" => FieldKind::ZPositive,
        "smooth" => FieldKind::Smooth,
        "bump" => FieldKind::Bump,
        other => return Err(invalid("symmetrize.field", format!("{other:?} is not one of z, z+, smooth, bump"))),
    };
    let oracle_n: usize = number("oracle.n", get("oracle.n"))?;
    if oracle_n == 0 {
        return Err(invalid("oracle.n", "dimension must be positive"));
    }
    Ok(RunConfig {
        command,
        mesh,
        problem,
        domain_z0: number("domain.z0", get("domain.z0"))?,
        p,
        solver,
        output: PathBuf::from(get("output")),
        seed: number("seed", get("seed"))?,
        aspects,
        battery_fields: number("battery.fields", get("battery.fields"))?,
        battery_thresholds: number("battery.thresholds", get("battery.thresholds"))?,
        oracle_n,
        oracle_problem,
        field,
        levels: number("symmetrize.levels", get("symmetrize.levels"))?,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_config("command = eigen\nmesh.kind = icosphere\nmesh.level = 5\np = 2").unwrap();
        assert_eq!(c.command, Command::Eigen);
        assert_eq!(c.mesh.kind, MeshKind::Icosphere);
        assert_eq!(c.mesh.level, 5);
        assert_eq!(c.p.len(), 1);
        assert_eq!(c.p[0].get(), 2.0);
        assert_eq!(c.problem, ProblemKind::Closed);
        assert_eq!(c.solver.tol, 1e-9);
        assert_eq!(c.solver.window, 10);
        assert_eq!(c.entries["seed"], "0");
    }

    #[test]
    fn exponent_out_of_range_names_bounds() {
        let e = parse_config("command = eigen\np = 0.9").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("1.1") && msg.contains("10"), "{msg}");
    }

    #[test]
    fn empty_file_misses_command() {
        assert_eq!(parse_config("").unwrap_err(), ConfigError::Missing("command"));
        assert_eq!(parse_config("# only a comment\n\n").unwrap_err(), ConfigError::Missing("command"));
    }

    #[test]
    fn comments_and_lists() {
        let c = parse_config("# sweep\ncommand = sweep # trailing\np = 1.5, 2,3\n").unwrap();
        assert_eq!(c.p.iter().map(|p| p.get()).collect::<Vec<_>>(), vec![1.5, 2.0, 3.0]);
        assert_eq!(c.aspects.len(), 5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_config("command = eigen\n\nfoo = 1").unwrap_err(),
            ConfigError::UnknownKey { line: 3, key: "foo".into() }
        );
        assert_eq!(
            parse_config("command = eigen\nmesh.level 4").unwrap_err(),
            ConfigError::Malformed { line: 2, text: "mesh.level 4".into() }
        );
        assert_eq!(
            parse_config("command = eigen\np = 2\np = 3").unwrap_err(),
            ConfigError::Duplicate { line: 3, key: "p".into() }
        );
    }

    #[test]
    fn invalid_values() {
        assert!(parse_config("command = fly").is_err());
        assert!(parse_config("command = eigen\nmesh.kind = torus").is_err());
        assert!(parse_config("command = eigen\nmesh.level = -1").is_err());
        assert!(parse_config("command = eigen\nmesh.kind = interval\nproblem = closed").is_err());
        assert!(parse_config("command = eigen\nsolver.tol = 0").is_err());
    }

    #[test]
    fn interval_defaults_to_dirichlet() {
        let c = parse_config("command = eigen\nmesh.kind = interval").unwrap();
        assert_eq!(c.problem, ProblemKind::Dirichlet);
    }
}

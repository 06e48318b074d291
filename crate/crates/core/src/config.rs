//! Scenario files.
//!
//! A scenario is a list of `key = value` lines with dotted keys, which is
//! also valid TOML:
//!
//! ```text
//! name = "steer"
//! physical.nu = 0.02
//! physical.length = 1.0
//! grid.elements = 12
//! initial.kind = "trig"
//! phase.1.control = "affine"
//! phase.1.gain = 0.5
//! phase.1.target = [0.0, 0.0, 1.0]
//! phase.1.until = "settle"
//! ```
//!
//! Every key except the phases has a default. The full key list is in
//! `docs/formats.md`.

use crate::discretization::MassKind;
use crate::dynamics::RhsKind;
use crate::field::{Equilibrium, PhysicalParams, SAT_TOL, UNIT_TOL};
use crate::integrator::{Phase, Projection, Termination};
use crate::scenario::{InitialCondition, IntegratorSettings, OutputConfig, ScenarioConfig};
use crate::vec3::Vec3;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("`{key}`: {reason}")]
    Field { key: String, reason: String },
}

fn field(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        key: key.into(),
        reason: reason.into(),
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Option<String>,
    #[serde(default)]
    physical: RawPhysical,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    initial: RawInitial,
    #[serde(default)]
    phase: BTreeMap<String, RawPhase>,
    #[serde(default)]
    integrator: RawIntegrator,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    report: RawReport,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPhysical {
    nu: Option<f64>,
    length: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    elements: Option<i64>,
    mass: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: Option<String>,
    winding: Option<f64>,
    value: Option<[f64; 3]>,
    file: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawUntil {
    Duration(f64),
    Word(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    control: String,
    gain: Option<f64>,
    target: Option<[f64; 3]>,
    base: Option<[f64; 3]>,
    until: Option<RawUntil>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    dt: Option<f64>,
    t_max: Option<f64>,
    steady_tol: Option<f64>,
    record_every: Option<i64>,
    projection: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    csv: Option<bool>,
    plot: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawReport {
    reference_settle: Option<[f64; 3]>,
}

/// Unit vector from config input. Vectors within [`UNIT_TOL`] of unit length
/// are kept bit for bit so echoed configs reproduce runs exactly; vectors
/// within [`SAT_TOL`] are normalized.
fn unit(key: &str, a: [f64; 3]) -> Result<Equilibrium, ConfigError> {
    let v = Vec3::from(a);
    let dev = v.norm() - 1.0;
    if !v.is_finite() || dev.abs() > SAT_TOL {
        return Err(field(key, format!("{a:?} is not a unit vector (|a| - 1 = {dev:e})")));
    }
    if dev.abs() <= UNIT_TOL {
        Equilibrium::new(v).map_err(|e| field(key, e.to_string()))
    } else {
        Equilibrium::normalized(v).map_err(|e| field(key, e.to_string()))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(field(key, format!("must be finite and > 0, got {v}")))
    }
}

fn phase_from_raw(index: &str, raw: RawPhase) -> Result<Phase, ConfigError> {
    let key = |k: &str| format!("phase.{index}.{k}");
    let gain = |required: bool| -> Result<f64, ConfigError> {
        match raw.gain {
            Some(g) => positive(&key("gain"), g),
            None if required => Err(field(key("gain"), "required for this control")),
            None => Ok(0.0),
        }
    };
    let vector = |name: &str, v: Option<[f64; 3]>| -> Result<Equilibrium, ConfigError> {
        let k = key(name);
        match v {
            Some(a) => unit(&k, a),
            None => Err(field(k, "required for this control")),
        }
    };
    let forbid = |name: &str, present: bool| -> Result<(), ConfigError> {
        if present {
            Err(field(key(name), format!("not used by control `{}`", raw.control)))
        } else {
            Ok(())
        }
    };
    let kind = match raw.control.as_str() {
        "none" => {
            forbid("gain", raw.gain.is_some())?;
            forbid("target", raw.target.is_some())?;
            forbid("base", raw.base.is_some())?;
            RhsKind::Uncontrolled
        }
        "affine" | "field" => {
            forbid("base", raw.base.is_some())?;
            let gain = gain(true)?;
            let target = vector("target", raw.target)?;
            if raw.control == "affine" {
                RhsKind::Affine { gain, target }
            } else {
                RhsKind::Field { gain, target }
            }
        }
        "linear_affine" => RhsKind::LinearAffine {
            base: vector("base", raw.base)?,
            gain: gain(true)?,
            target: vector("target", raw.target)?,
        },
        "linear_field" => {
            forbid("target", raw.target.is_some())?;
            RhsKind::LinearField {
                base: vector("base", raw.base)?,
                gain: gain(true)?,
            }
        }
        other => {
            return Err(field(
                key("control"),
                format!("unknown control `{other}` (none, affine, field, linear_affine, linear_field)"),
            ))
        }
    };
    let until = match raw.until {
        None => Termination::Settle,
        Some(RawUntil::Word(w)) if w == "settle" => Termination::Settle,
        Some(RawUntil::Word(w)) => {
            return Err(field(key("until"), format!("expected \"settle\" or a duration, got `{w}`")))
        }
        Some(RawUntil::Duration(t)) => Termination::Duration(positive(&key("until"), t)?),
    };
    Ok(Phase::new(kind, until))
}

/// Parses scenario text. Relative file paths are resolved against `base_dir`.
pub fn parse_str(text: &str, base_dir: Option<&Path>) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let resolve = |p: PathBuf| match base_dir {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    };

    let name = raw.name.unwrap_or_else(|| "scenario".to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(field("name", "must be non-empty and contain no path separators"));
    }

    let nu = raw.physical.nu.unwrap_or(0.02);
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(field("physical.nu", format!("must be finite and >= 0, got {nu}")));
    }
    let length = positive("physical.length", raw.physical.length.unwrap_or(1.0))?;
    let physical = PhysicalParams::new(nu, length).map_err(|e| field("physical", e.to_string()))?;

    let n_elements = raw.grid.elements.unwrap_or(12);
    if !(2..=1_000_000).contains(&n_elements) {
        return Err(field("grid.elements", format!("must be in 2..=1000000, got {n_elements}")));
    }
    let mass = match raw.grid.mass.as_deref() {
        None | Some("lumped") => MassKind::Lumped,
        Some("consistent") => MassKind::Consistent,
        Some(o) => return Err(field("grid.mass", format!("expected lumped or consistent, got `{o}`"))),
    };

    let ri = raw.initial;
    let kind = ri.kind.as_deref().unwrap_or("trig");
    let initial = match kind {
        "trig" => {
            if ri.value.is_some() || ri.file.is_some() {
                return Err(field("initial", "trig takes only `winding`"));
            }
            let winding = ri.winding.unwrap_or(1.0);
            if !winding.is_finite() {
                return Err(field("initial.winding", "must be finite"));
            }
            InitialCondition::Trig { winding }
        }
        "constant" => {
            if ri.winding.is_some() || ri.file.is_some() {
                return Err(field("initial", "constant takes only `value`"));
            }
            let v = ri.value.ok_or_else(|| field("initial.value", "required for kind constant"))?;
            InitialCondition::Constant(unit("initial.value", v)?.vector())
        }
        "nodal" => {
            if ri.winding.is_some() || ri.value.is_some() {
                return Err(field("initial", "nodal takes only `file`"));
            }
            let f = ri.file.ok_or_else(|| field("initial.file", "required for kind nodal"))?;
            InitialCondition::Nodal(resolve(f))
        }
        o => return Err(field("initial.kind", format!("expected trig, constant or nodal, got `{o}`"))),
    };

    if raw.phase.is_empty() {
        return Err(field("phase", "at least one phase (phase.1.control = ...) is required"));
    }
    let mut numbered = Vec::with_capacity(raw.phase.len());
    for (k, p) in raw.phase {
        let idx: usize = k
            .parse()
            .map_err(|_| field(format!("phase.{k}"), "phase keys must be positive integers"))?;
        numbered.push((idx, k, p));
    }
    numbered.sort_by_key(|(i, _, _)| *i);
    let mut phases = Vec::with_capacity(numbered.len());
    for (expected, (idx, k, p)) in (1..).zip(numbered) {
        if idx != expected {
            return Err(field(format!("phase.{k}"), format!("phases must be numbered 1, 2, ...; expected {expected}")));
        }
        phases.push(phase_from_raw(&k, p)?);
    }

    let rg = raw.integrator;
    let defaults = IntegratorSettings::default();
    let integrator = IntegratorSettings {
        dt: rg.dt.map(|v| positive("integrator.dt", v)).transpose()?,
        t_max: positive("integrator.t_max", rg.t_max.unwrap_or(defaults.t_max))?,
        steady_tol: positive("integrator.steady_tol", rg.steady_tol.unwrap_or(defaults.steady_tol))?,
        record_every: match rg.record_every {
            None => defaults.record_every,
            Some(n) if n >= 1 => n as usize,
            Some(n) => return Err(field("integrator.record_every", format!("must be >= 1, got {n}"))),
        },
        projection: match rg.projection.as_deref() {
            None | Some("off") => Projection::Off,
            Some("renormalize") => Projection::Renormalize,
            Some(o) => {
                return Err(field("integrator.projection", format!("expected off or renormalize, got `{o}`")))
            }
        },
    };
    if let Some(dt) = integrator.dt {
        if dt >= integrator.t_max {
            return Err(field("integrator.dt", "must be smaller than integrator.t_max"));
        }
    }

    let output = OutputConfig {
        dir: resolve(raw.output.dir.unwrap_or_else(|| PathBuf::from("out").join(&name))),
        csv: raw.output.csv.unwrap_or(true),
        plot: raw.output.plot.unwrap_or(true),
    };
    let reference_settle = raw.report.reference_settle.map(Vec3::from);
    if reference_settle.is_some_and(|v| !v.is_finite()) {
        return Err(field("report.reference_settle", "must be finite"));
    }

    Ok(ScenarioConfig {
        name,
        physical,
        n_elements: n_elements as usize,
        mass,
        initial,
        phases,
        integrator,
        output,
        reference_settle,
    })
}

pub fn parse_file(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_str(&text, path.parent())
}

fn vec_lit(v: Vec3) -> String {
    format!("[{:?}, {:?}, {:?}]", v.x, v.y, v.z)
}

fn path_lit(p: &Path) -> String {
    toml::Value::String(p.to_string_lossy().into_owned()).to_string()
}

/// Writes `cfg` back in the same format with every default spelled out.
/// Floats use the shortest representation that parses back to the same bits.
pub fn to_config_string(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name = {}", toml::Value::String(cfg.name.clone()));
    let _ = writeln!(s, "physical.nu = {:?}", cfg.physical.nu);
    let _ = writeln!(s, "physical.length = {:?}", cfg.physical.length);
    let _ = writeln!(s, "grid.elements = {}", cfg.n_elements);
    let mass = match cfg.mass {
        MassKind::Lumped => "lumped",
        MassKind::Consistent => "consistent",
    };
    let _ = writeln!(s, "grid.mass = \"{mass}\"");
    match &cfg.initial {
        InitialCondition::Trig { winding } => {
            let _ = writeln!(s, "initial.kind = \"trig\"\ninitial.winding = {winding:?}");
        }
        InitialCondition::Constant(v) => {
            let _ = writeln!(s, "initial.kind = \"constant\"\ninitial.value = {}", vec_lit(*v));
        }
        InitialCondition::Nodal(p) => {
            let _ = writeln!(s, "initial.kind = \"nodal\"\ninitial.file = {}", path_lit(p));
        }
    }
    for (i, ph) in cfg.phases.iter().enumerate() {
        let i = i + 1;
        let _ = writeln!(s, "phase.{i}.control = \"{}\"", ph.kind.label());
        match ph.kind {
            RhsKind::Uncontrolled => {}
            RhsKind::Affine { gain, target } | RhsKind::Field { gain, target } => {
                let _ = writeln!(s, "phase.{i}.gain = {gain:?}");
                let _ = writeln!(s, "phase.{i}.target = {}", vec_lit(target.vector()));
            }
            RhsKind::LinearAffine { base, gain, target } => {
                let _ = writeln!(s, "phase.{i}.gain = {gain:?}");
                let _ = writeln!(s, "phase.{i}.base = {}", vec_lit(base.vector()));
                let _ = writeln!(s, "phase.{i}.target = {}", vec_lit(target.vector()));
            }
            RhsKind::LinearField { base, gain } => {
                let _ = writeln!(s, "phase.{i}.gain = {gain:?}");
                let _ = writeln!(s, "phase.{i}.base = {}", vec_lit(base.vector()));
            }
        }
        match ph.until {
            Termination::Settle => {
                let _ = writeln!(s, "phase.{i}.until = \"settle\"");
            }
            Termination::Duration(t) => {
                let _ = writeln!(s, "phase.{i}.until = {t:?}");
            }
        }
    }
    let g = &cfg.integrator;
    if let Some(dt) = g.dt {
        let _ = writeln!(s, "integrator.dt = {dt:?}");
    }
    let _ = writeln!(s, "integrator.t_max = {:?}", g.t_max);
    let _ = writeln!(s, "integrator.steady_tol = {:?}", g.steady_tol);
    let _ = writeln!(s, "integrator.record_every = {}", g.record_every);
    let proj = match g.projection {
        Projection::Off => "off",
        Projection::Renormalize => "renormalize",
    };
    let _ = writeln!(s, "integrator.projection = \"{proj}\"");
    let _ = writeln!(s, "output.dir = {}", path_lit(&cfg.output.dir));
    let _ = writeln!(s, "output.csv = {}", cfg.output.csv);
    let _ = writeln!(s, "output.plot = {}", cfg.output.plot);
    if let Some(r) = cfg.reference_settle {
        let _ = writeln!(s, "report.reference_settle = {}", vec_lit(r));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "phase.1.control = \"none\"\n";

    #[test]
    fn defaults_fill_in() {
        let c = parse_str(MINIMAL, None).unwrap();
        assert_eq!(c.physical.nu, 0.02);
        assert_eq!(c.n_elements, 12);
        assert_eq!(c.mass, MassKind::Lumped);
        assert_eq!(c.initial, InitialCondition::Trig { winding: 1.0 });
        assert_eq!(c.phases.len(), 1);
        assert_eq!(c.phases[0].until, Termination::Settle);
        assert_eq!(c.output.dir, PathBuf::from("out/scenario"));
    }

    #[test]
    fn full_file() {
        let text = r#"
name = "chain"
physical.nu = 0.05
grid.elements = 24
grid.mass = "consistent"
initial.kind = "constant"
initial.value = [0, 0, 1]
phase.2.control = "field"
phase.2.gain = 10
phase.2.target = [0.0, 1.0, 0.0]
phase.1.control = "affine"
phase.1.gain = 0.5
phase.1.target = [1, 0, 0]
phase.1.until = 12.5
integrator.dt = 1e-4
integrator.projection = "renormalize"
output.plot = false
"#;
        let c = parse_str(text, Some(Path::new("/tmp/x"))).unwrap();
        assert_eq!(c.name, "chain");
        assert_eq!(c.mass, MassKind::Consistent);
        assert!(matches!(c.phases[0].kind, RhsKind::Affine { gain, .. } if gain == 0.5));
        assert_eq!(c.phases[0].until, Termination::Duration(12.5));
        assert!(matches!(c.phases[1].kind, RhsKind::Field { gain, .. } if gain == 10.0));
        assert_eq!(c.integrator.dt, Some(1e-4));
        assert_eq!(c.integrator.projection, Projection::Renormalize);
        assert_eq!(c.output.dir, PathBuf::from("/tmp/x/out/chain"));
        assert!(!c.output.plot);
    }

    #[test]
    fn echo_round_trips() {
        let text = r#"
name = "echo"
physical.nu = 0.1
initial.winding = 2
phase.1.control = "linear_affine"
phase.1.gain = 0.3
phase.1.base = [0.6, 0.8, 0]
phase.1.target = [-0.7071067811865476, 0, 0.7071067811865476]
phase.1.until = 3
phase.2.control = "linear_field"
phase.2.gain = 2
phase.2.base = [0, 0, 1]
report.reference_settle = [0, -0.6, 0]
"#;
        let c = parse_str(text, None).unwrap();
        let again = parse_str(&to_config_string(&c), None).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let e = parse_str("phase.1.control = \"none\"\nphysical.nu = = 3\n", None).unwrap_err();
        assert!(matches!(e, ConfigError::Syntax(_)));
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = parse_str("phase.1.control = \"none\"\nphysical.mu = 3\n", None).unwrap_err();
        assert!(e.to_string().contains("mu"), "{e}");
    }

    #[test]
    fn field_errors_name_the_key() {
        let cases = [
            ("phase.1.control = \"affine\"\nphase.1.target = [0,0,1]\n", "phase.1.gain"),
            ("phase.1.control = \"affine\"\nphase.1.gain = 1\nphase.1.target = [0,0,2]\n", "phase.1.target"),
            ("phase.1.control = \"bang\"\n", "phase.1.control"),
            ("phase.1.control = \"none\"\nphase.1.gain = 1\n", "phase.1.gain"),
            ("phase.1.control = \"none\"\nphase.1.until = -1\n", "phase.1.until"),
            ("phase.1.control = \"none\"\nphase.1.until = \"forever\"\n", "phase.1.until"),
            ("phase.2.control = \"none\"\n", "phase.2"),
            ("phase.x.control = \"none\"\n", "phase.x"),
            ("phase.1.control = \"none\"\nphysical.nu = -1\n", "physical.nu"),
            ("phase.1.control = \"none\"\ngrid.elements = 1\n", "grid.elements"),
            ("phase.1.control = \"none\"\ngrid.mass = \"heavy\"\n", "grid.mass"),
            ("phase.1.control = \"none\"\nintegrator.dt = 0\n", "integrator.dt"),
            ("phase.1.control = \"none\"\nintegrator.record_every = 0\n", "integrator.record_every"),
            ("phase.1.control = \"none\"\ninitial.kind = \"constant\"\n", "initial.value"),
            ("physical.nu = 0.1\n", "phase"),
        ];
        for (text, key) in cases {
            match parse_str(text, None) {
                Err(ConfigError::Field { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn near_unit_targets_are_normalized() {
        let c = parse_str(
            "phase.1.control = \"field\"\nphase.1.gain = 1\nphase.1.target = [0, 0, 1.0000001]\n",
            None,
        )
        .unwrap();
        assert_eq!(c.phases[0].kind.target().unwrap().vector(), Vec3::Z);
    }
}

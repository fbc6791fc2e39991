//! Flat `key = value` run configuration.
//!
//! ```text
//! # rubber experiment
//! mode  = simulate
//! D     = 3.66e-4
//! sigma = linear(0.1)
//! b     = constant(1.0)
//! ```
//!
//! One assignment per line, `#` starts a comment, keys come from a closed
//! set and unknown keys are errors. Values are decimal numbers, bare or
//! quoted strings, or function specs `constant(c)`, `linear(c)` and
//! `table(x0:v0, x1:v1, ...)`.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::{SpaceStudy, TimeStudy};
use crate::model::{
    nondimensionalize, Coefficient, DimensionlessParameters, ModelError, PhysicalParameters,
    DEFAULT_L_MAX,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    ConvergenceSpace,
    ConvergenceTime,
    CheckInvariants,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "convergence-space" => Ok(Mode::ConvergenceSpace),
            "convergence-time" => Ok(Mode::ConvergenceTime),
            "check-invariants" | "check" => Ok(Mode::CheckInvariants),
            other => Err(format!(
                "unknown mode `{other}` (expected simulate, convergence-space, convergence-time or check-invariants)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Simulate => "simulate",
            Mode::ConvergenceSpace => "convergence-space",
            Mode::ConvergenceTime => "convergence-time",
            Mode::CheckInvariants => "check-invariants",
        })
    }
}

/// Every key the grammar accepts, with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    (
        "mode",
        "simulate | convergence-space | convergence-time | check-invariants",
    ),
    ("D", "diffusivity [mm^2/min]"),
    ("beta", "interface capacity at x = 0 [mm/min]"),
    ("H", "Henry constant"),
    ("a0", "kinetic coefficient of the interface law"),
    ("s0", "initial interface position [mm]"),
    ("m0", "concentration scale [gram/mm^3]"),
    ("L", "maximal interface position [mm]"),
    ("Tf", "final physical time [min]"),
    ("b", "boundary concentration b(t), a function spec"),
    ("sigma", "interface resistance sigma(s), a function spec"),
    ("sigma_plateau", "optional saturation level c0 for sigma"),
    (
        "u0",
        "initial concentration m(0, x), a function spec (default constant(m0))",
    ),
    ("Bi", "override for the Biot number"),
    ("A0", "override for the dimensionless kinetic coefficient"),
    ("T", "override for the dimensionless final time"),
    ("n_nodes", "mesh nodes for simulate / check-invariants"),
    (
        "dt",
        "dimensionless time step for simulate / check-invariants",
    ),
    ("record_every", "write every k-th step (default 1)"),
    ("output_dir", "directory for output files (default .)"),
    ("space_dt", "time step of the space study (default 1e-4)"),
    (
        "space_base_nodes",
        "coarsest mesh of the space study (default 20)",
    ),
    (
        "space_levels",
        "number of doublings in the space study (default 6)",
    ),
    (
        "space_reference_nodes",
        "reference mesh of the space study (default 1280)",
    ),
    ("time_nodes", "mesh of the time study (default 320)"),
    (
        "time_base_dt",
        "coarsest step of the time study (default 1e-3)",
    ),
    (
        "time_levels",
        "number of halvings in the time study (default 6)",
    ),
    (
        "time_reference_divisor",
        "reference step is time_base_dt / divisor (default 64)",
    ),
];

const PHYSICAL_REQUIRED: &[&str] = &["D", "beta", "H", "a0", "s0", "m0", "Tf", "b", "sigma"];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Function(Coefficient),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub biot: Option<f64>,
    pub a0: Option<f64>,
    pub t_final: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub physical: PhysicalParameters,
    /// Initial concentration as a function of `x` [mm].
    pub u0: Coefficient,
    pub overrides: Overrides,
    pub n_nodes: Option<usize>,
    pub dt: Option<f64>,
    pub record_every: usize,
    pub output_dir: PathBuf,
    pub space: SpaceStudy,
    pub time: TimeStudy,
}

impl RunConfig {
    pub fn dimensionless(&self) -> Result<DimensionlessParameters, ModelError> {
        let mut d = nondimensionalize(&self.physical, &self.u0)?;
        if let Some(v) = self.overrides.biot {
            d.biot = v;
        }
        if let Some(v) = self.overrides.a0 {
            d.a0 = v;
        }
        if let Some(v) = self.overrides.t_final {
            d.t_final = v;
        }
        Ok(d)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with_mode(text, None)
}

/// Parses a document; `mode` replaces any `mode` key in the text.
pub fn parse_config_with_mode(text: &str, mode: Option<Mode>) -> Result<RunConfig, ConfigError> {
    let entries = parse_entries(text)?;
    build(entries, mode)
}

type Entries = HashMap<String, (usize, Value)>;

fn parse_entries(text: &str) -> Result<Entries, ConfigError> {
    let mut out = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("malformed key `{key}`"),
            });
        }
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        let value =
            parse_value(value.trim()).map_err(|message| ConfigError::Syntax { line, message })?;
        if out.insert(key.to_string(), (line, value)).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    Ok(out)
}

fn parse_value(s: &str) -> Result<Value, String> {
    if s.is_empty() {
        return Err("missing value".to_string());
    }
    if let Some(inner) = s.strip_prefix('"') {
        let text = inner.strip_suffix('"').ok_or("unterminated string")?;
        return Ok(Value::Text(text.to_string()));
    }
    if let Some(open) = s.find('(') {
        let name = s[..open].trim();
        let args = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| format!("missing `)` in `{s}`"))?
            .trim();
        return parse_function(name, args).map(Value::Function);
    }
    if let Ok(v) = s.parse::<f64>() {
        return Ok(Value::Number(v));
    }
    Ok(Value::Text(s.to_string()))
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("`{}` is not finite", s.trim()));
    }
    Ok(v)
}

fn parse_function(name: &str, args: &str) -> Result<Coefficient, String> {
    match name {
        "constant" => Ok(Coefficient::Constant(parse_number(args)?)),
        "linear" => Ok(Coefficient::Linear(parse_number(args)?)),
        "table" => {
            let points = args
                .split(',')
                .map(|pair| {
                    let (x, v) = pair.split_once(':').ok_or_else(|| {
                        format!("table entries are `x:value`, found `{}`", pair.trim())
                    })?;
                    Ok((parse_number(x)?, parse_number(v)?))
                })
                .collect::<Result<Vec<_>, String>>()?;
            Coefficient::tabulated(points).map_err(|e| e.to_string())
        }
        other => Err(format!(
            "unknown function `{other}` (expected constant, linear or table)"
        )),
    }
}

struct Reader {
    entries: Entries,
}

impl Reader {
    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((_, Value::Number(v))) if v.is_finite() => Ok(Some(*v)),
            Some((_, other)) => Err(ConfigError::Invalid {
                key: key.to_string(),
                message: format!("expected a finite number, found {other:?}"),
            }),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.number(key)? {
            Some(v) if v <= 0.0 => Err(ConfigError::Invalid {
                key: key.to_string(),
                message: format!("must be positive, got {v}"),
            }),
            v => Ok(v),
        }
    }

    fn count(&self, key: &str, min: usize) -> Result<Option<usize>, ConfigError> {
        match self.number(key)? {
            None => Ok(None),
            Some(v) if v.fract() == 0.0 && v >= min as f64 && v <= u32::MAX as f64 => {
                Ok(Some(v as usize))
            }
            Some(v) => Err(ConfigError::Invalid {
                key: key.to_string(),
                message: format!("must be an integer >= {min}, got {v}"),
            }),
        }
    }

    fn function(&self, key: &str) -> Result<Option<Coefficient>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((_, Value::Function(c))) => Ok(Some(c.clone())),
            Some((_, Value::Number(v))) => Ok(Some(Coefficient::Constant(*v))),
            Some((_, other)) => Err(ConfigError::Invalid {
                key: key.to_string(),
                message: format!("expected a function spec, found {other:?}"),
            }),
        }
    }

    fn text(&self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((_, Value::Text(s))) => Ok(Some(s.clone())),
            Some((_, Value::Number(v))) => Ok(Some(v.to_string())),
            Some((_, other)) => Err(ConfigError::Invalid {
                key: key.to_string(),
                message: format!("expected a string, found {other:?}"),
            }),
        }
    }
}

fn build(entries: Entries, mode_override: Option<Mode>) -> Result<RunConfig, ConfigError> {
    let r = Reader { entries };

    let mode = match mode_override {
        Some(m) => Some(m),
        None => match r.text("mode")? {
            Some(s) => Some(s.parse::<Mode>().map_err(|message| ConfigError::Invalid {
                key: "mode".to_string(),
                message,
            })?),
            None => None,
        },
    };

    let mut missing: Vec<String> = Vec::new();
    if mode.is_none() {
        missing.push("mode".to_string());
    }
    missing.extend(
        PHYSICAL_REQUIRED
            .iter()
            .filter(|k| !r.entries.contains_key(**k))
            .map(|k| k.to_string()),
    );
    if matches!(mode, Some(Mode::Simulate | Mode::CheckInvariants)) {
        for k in ["n_nodes", "dt"] {
            if !r.entries.contains_key(k) {
                missing.push(k.to_string());
            }
        }
    }
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }
    let mode = mode.expect("checked above");

    let req = |v: Option<f64>| v.expect("presence checked above");
    let m0 = req(r.positive("m0")?);
    let physical = PhysicalParameters {
        diffusivity: req(r.positive("D")?),
        beta: req(r.positive("beta")?),
        henry: req(r.positive("H")?),
        a0: req(r.positive("a0")?),
        s0: req(r.positive("s0")?),
        m0,
        l_max: r.positive("L")?.unwrap_or(DEFAULT_L_MAX),
        t_final: req(r.positive("Tf")?),
        b: r.function("b")?.expect("presence checked above"),
        sigma: r.function("sigma")?.expect("presence checked above"),
        sigma_plateau: r.positive("sigma_plateau")?,
    };
    let u0 = r.function("u0")?.unwrap_or(Coefficient::Constant(m0));
    let overrides = Overrides {
        biot: r.number("Bi")?,
        a0: r.number("A0")?,
        t_final: r.positive("T")?,
    };

    let defaults_space = SpaceStudy::default();
    let base_nodes = r
        .count("space_base_nodes", 2)?
        .unwrap_or(defaults_space.nodes[0]);
    let space_levels = r
        .count("space_levels", 1)?
        .unwrap_or(defaults_space.nodes.len());
    if space_levels > 20 {
        return Err(ConfigError::Invalid {
            key: "space_levels".to_string(),
            message: "at most 20 levels".to_string(),
        });
    }
    let space = SpaceStudy {
        dt: r.positive("space_dt")?.unwrap_or(defaults_space.dt),
        nodes: (0..space_levels).map(|i| base_nodes << i).collect(),
        reference_nodes: r
            .count("space_reference_nodes", 2)?
            .unwrap_or(defaults_space.reference_nodes),
    };

    let time_levels = r.count("time_levels", 1)?.unwrap_or(6);
    if time_levels > 20 {
        return Err(ConfigError::Invalid {
            key: "time_levels".to_string(),
            message: "at most 20 levels".to_string(),
        });
    }
    let time = TimeStudy::halving(
        r.count("time_nodes", 2)?.unwrap_or(320),
        r.positive("time_base_dt")?.unwrap_or(1e-3),
        time_levels,
        r.count("time_reference_divisor", 1)?.unwrap_or(64),
    );

    Ok(RunConfig {
        mode,
        physical,
        u0,
        overrides,
        n_nodes: r.count("n_nodes", 2)?,
        dt: r.positive("dt")?,
        record_every: r.count("record_every", 1)?.unwrap_or(1),
        output_dir: PathBuf::from(r.text("output_dir")?.unwrap_or_else(|| ".".to_string())),
        space,
        time,
    })
}

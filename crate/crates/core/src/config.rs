//! Plain-text run configuration.
//!
//! A configuration is a sequence of `[section]` headers followed by
//! `key = value` lines. Blank lines and lines starting with `#` are ignored.
//! Exactly one command section is required; the optional `[run]` section
//! carries the seed and output paths.
//!
//! ```text
//! [john.solve]
//! psi0_dot = poly_bump:-1,4,0.5
//! amplitude = 0.04
//! start_time = -0.5
//!
//! [run]
//! json = out/summary.json
//! ```
//!
//! Values are typed: floats accept `inf`, lists are comma separated, profile
//! values are validated with [`Profile1D::parse`].

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::profile::{Profile1D, ProfileError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("unknown key '{key}' in section [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("key '{key}' in section [{section}]: expected {expected}, got '{found}'")]
    TypeError {
        section: String,
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("missing required key '{key}' in section [{section}]")]
    MissingKey { section: String, key: String },
    #[error("{0}")]
    UsageError(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Command {
    #[serde(rename = "burgers")]
    Burgers,
    #[serde(rename = "john.solve")]
    JohnSolve,
    #[serde(rename = "john.predict")]
    JohnPredict,
    #[serde(rename = "john.sweep")]
    JohnSweep,
    #[serde(rename = "nullcond.check")]
    NullcondCheck,
    #[serde(rename = "nullcond.aleph")]
    NullcondAleph,
    #[serde(rename = "nullcond.fluid")]
    NullcondFluid,
    #[serde(rename = "lifespan")]
    Lifespan,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Burgers,
        Command::JohnSolve,
        Command::JohnPredict,
        Command::JohnSweep,
        Command::NullcondCheck,
        Command::NullcondAleph,
        Command::NullcondFluid,
        Command::Lifespan,
    ];

    pub fn section(self) -> &'static str {
        match self {
            Command::Burgers => "burgers",
            Command::JohnSolve => "john.solve",
            Command::JohnPredict => "john.predict",
            Command::JohnSweep => "john.sweep",
            Command::NullcondCheck => "nullcond.check",
            Command::NullcondAleph => "nullcond.aleph",
            Command::NullcondFluid => "nullcond.fluid",
            Command::Lifespan => "lifespan",
        }
    }

    pub fn from_section(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.section() == s)
    }

    fn schema(self) -> &'static [KeySpec] {
        match self {
            Command::Burgers => BURGERS,
            Command::JohnSolve | Command::JohnPredict => JOHN,
            Command::JohnSweep => JOHN_SWEEP,
            Command::NullcondCheck => NULL_CHECK,
            Command::NullcondAleph => NULL_ALEPH,
            Command::NullcondFluid => NULL_FLUID,
            Command::Lifespan => LIFESPAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Float,
    Int,
    Bool,
    Str,
    Profile,
    FloatList,
}

impl ValueType {
    fn name(self) -> &'static str {
        match self {
            ValueType::Float => "a number",
            ValueType::Int => "a non-negative integer",
            ValueType::Bool => "true or false",
            ValueType::Str => "a string",
            ValueType::Profile => "a profile spec",
            ValueType::FloatList => "a comma-separated list of numbers",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    FloatList(Vec<f64>),
}

/// Non-finite numbers serialize as the strings `inf` and `-inf`.
impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        fn num<S: serde::Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
            if v.is_finite() {
                s.serialize_f64(v)
            } else {
                s.serialize_str(&format!("{v:?}"))
            }
        }
        struct Num(f64);
        impl Serialize for Num {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                num(self.0, s)
            }
        }
        match self {
            Value::Float(v) => num(*v, s),
            Value::Int(v) => s.serialize_u64(*v),
            Value::Bool(v) => s.serialize_bool(*v),
            Value::Str(v) => s.serialize_str(v),
            Value::FloatList(vs) => {
                let mut seq = s.serialize_seq(Some(vs.len()))?;
                for v in vs {
                    seq.serialize_element(&Num(*v))?;
                }
                seq.end()
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Str(s) => write!(f, "{s}"),
            Value::FloatList(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| format!("{v:?}")).collect();
                write!(f, "{}", parts.join(", "))
            }
        }
    }
}

/// One documented key: name, type and default (`None` means optional
/// without a default, `Some("")` never occurs).
pub struct KeySpec {
    pub name: &'static str,
    pub ty: ValueType,
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn key(name: &'static str, ty: ValueType, default: Option<&'static str>, doc: &'static str) -> KeySpec {
    KeySpec { name, ty, default, doc }
}

use ValueType::{Bool, Float, FloatList, Int, Profile as Prof, Str};

const BURGERS: &[KeySpec] = &[
    key("profile", Prof, Some("gaussian:1,0,1"), "initial profile Ψ̊"),
    key("lambda", FloatList, Some("1"), "amplitudes λ of the family λΨ̊"),
    key("t_max", Float, Some("2"), "end time of the characteristic table"),
    key("n_t", Int, Some("21"), "table times"),
    key("n_alpha", Int, Some("201"), "table launch points"),
    key("fan_points", Int, Some("20001"), "launch points for the Jacobian-zero search"),
];

const JOHN_COMMON: &[KeySpec] = &[
    key("psi0", Prof, Some("zero"), "Ψ̊ profile in r"),
    key("psi0_dot", Prof, Some("zero"), "Ψ̊₀ profile in r"),
    key("amplitude", Float, Some("1"), "amplitude λ multiplying both profiles"),
    key("support", Float, None, "data support radius (default 1 for start 0, 1/2 for start −1/2)"),
    key("start_time", Float, Some("0"), "data time, 0 or -0.5"),
    key("u0", Float, Some("0.9"), "strip width U0"),
    key("n_u", Int, Some("200"), "cells in u"),
    key("policy", Str, Some("log_time"), "step policy: log_time or courant"),
    key("kappa", Float, Some("2"), "step factor κ"),
    key("dtau_max", Float, Some("0.02"), "largest log-time step (log_time policy)"),
    key("dt_max", Float, Some("0.05"), "largest physical step (courant policy)"),
    key("mu_stop", Float, Some("0.01"), "stop once min μ reaches this value"),
    key("t_max", Float, Some("inf"), "stop time"),
    key("tau_max", Float, Some("10000"), "stop log-time ln(1+t)"),
    key("history_stride", Int, Some("100"), "steps between μ history samples"),
    key("max_steps", Int, Some("50000000"), "hard step cap"),
    key("mol_cells", Int, Some("1024"), "radial cells per unit for the t = −1/2 pre-evolution"),
    key("slice_stride", Int, Some("100"), "steps between per-slice CSV dumps"),
    key("order_check", Bool, Some("false"), "also measure the scheme order"),
    key("order_n_u", Int, Some("60"), "coarsest n_u of the order measurement"),
    key("order_steps", Int, Some("80"), "coarsest step count of the order measurement"),
    key("order_t_end", Float, Some("1"), "end time of the order measurement"),
];

const JOHN: &[KeySpec] = JOHN_COMMON;

const JOHN_SWEEP: &[KeySpec] = &[
    key("psi0", Prof, Some("zero"), "Ψ̊ profile in r"),
    key("psi0_dot", Prof, Some("zero"), "Ψ̊₀ profile in r"),
    key("lambda", FloatList, None, "amplitudes to sweep (at least two)"),
    key("support", Float, None, "data support radius"),
    key("start_time", Float, Some("0"), "data time, 0 or -0.5"),
    key("u0", Float, Some("0.9"), "strip width U0"),
    key("n_u", Int, Some("200"), "cells in u"),
    key("policy", Str, Some("log_time"), "step policy: log_time or courant"),
    key("kappa", Float, Some("2"), "step factor κ"),
    key("dtau_max", Float, Some("0.02"), "largest log-time step"),
    key("dt_max", Float, Some("0.05"), "largest physical step"),
    key("mu_stop", Float, Some("0.01"), "stop once min μ reaches this value"),
    key("t_max", Float, Some("inf"), "stop time"),
    key("tau_max", Float, Some("10000"), "stop log-time"),
    key("history_stride", Int, Some("100"), "steps between μ history samples"),
    key("max_steps", Int, Some("50000000"), "hard step cap"),
    key("mol_cells", Int, Some("1024"), "radial cells per unit for the pre-evolution"),
];

const NULL_METRIC: &[KeySpec] = &[
    key("metric", Str, None, "built-in metric family"),
    key("g2", FloatList, None, "G_{μν}, 16 numbers row-major, index 0 = t"),
    key("g3", FloatList, None, "G^λ_{αβ}, 64 numbers row-major as [λ][α][β]"),
];

const NULL_CHECK: &[KeySpec] = &[
    key("metric", Str, None, "built-in metric family"),
    key("g2", FloatList, None, "G_{μν}, 16 numbers"),
    key("g3", FloatList, None, "G^λ_{αβ}, 64 numbers"),
    key("a3", FloatList, None, "𝒜^{μνσ}, 64 numbers as [μ][ν][σ]"),
    key("a2", FloatList, None, "𝒜′^{μν}, 16 numbers"),
    key("n", FloatList, None, "𝒩^{μν}, 16 numbers"),
    key("n_dirs", Int, Some("4096"), "sphere sample size"),
];

const NULL_ALEPH: &[KeySpec] = &[
    key("metric", Str, None, "built-in metric family"),
    key("g2", FloatList, None, "G_{μν}, 16 numbers"),
    key("g3", FloatList, None, "G^λ_{αβ}, 64 numbers"),
    key("n_dirs", Int, Some("4096"), "sphere sample size for the ranges"),
    key("theta_grid", Int, Some("256"), "directions in the CSV sphere map"),
];

const NULL_FLUID: &[KeySpec] = &[
    key("lagrangian", Str, Some("exceptional"), "exceptional[:s], linear, quadratic:a,b or expr:<e>"),
    key("k", Float, Some("0.5"), "background constant k"),
    key("derivative", Str, Some("analytic"), "analytic or fd"),
    key("fd_step", Float, None, "base finite-difference step"),
    key("tol", Float, Some("1e-10"), "exceptionality tolerance"),
];

const LIFESPAN: &[KeySpec] = &[
    key("phi0", Prof, Some("zero"), "radial Φ̊ profile"),
    key("phi0_dot", Prof, Some("poly_bump:1,4,0.5"), "radial Φ̊₀ profile"),
    key("aleph", Str, Some("john"), "built-in metric family or constant:c"),
    key("lambda", FloatList, Some("0.1"), "amplitudes for the lifespan bound"),
    key("n_q", Int, Some("513"), "q-grid points"),
    key("n_theta", Int, Some("1024"), "sphere directions"),
    key("refine", Bool, Some("true"), "refine once near the argmax"),
    key("s_k", Float, None, "background k for the functional S (enables it)"),
    key("s_lagrangian", Str, Some("exceptional"), "Lagrangian supplying η₀ and dH/dσ"),
    key("s_u", FloatList, Some("0.1, 0.2, 0.3, 0.4"), "values of U for S(U)"),
];

const RUN: &[KeySpec] = &[
    key("seed", Int, Some("0"), "seed for randomized suites"),
    key("json", Str, None, "JSON summary path"),
    key("csv", Str, None, "CSV output path"),
    key("record_timing", Bool, Some("false"), "include wall time in the summary"),
];

/// Keys of the metric part shared by the null-condition sections.
pub fn metric_keys() -> &'static [KeySpec] {
    NULL_METRIC
}

pub fn schema(command: Command) -> &'static [KeySpec] {
    command.schema()
}

pub fn run_schema() -> &'static [KeySpec] {
    RUN
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, Value>,
    pub run: BTreeMap<String, Value>,
}

fn parse_value(
    section: &str,
    name: &str,
    ty: ValueType,
    raw: &str,
    line: usize,
    column: usize,
) -> Result<Value, ConfigError> {
    let type_error = || ConfigError::TypeError {
        section: section.to_string(),
        key: name.to_string(),
        expected: ty.name(),
        found: raw.to_string(),
    };
    let float = |s: &str| -> Option<f64> { s.trim().parse::<f64>().ok().filter(|v| !v.is_nan()) };
    Ok(match ty {
        ValueType::Float => Value::Float(float(raw).ok_or_else(type_error)?),
        ValueType::Int => Value::Int(raw.parse::<u64>().map_err(|_| type_error())?),
        ValueType::Bool => match raw {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => return Err(type_error()),
        },
        ValueType::Str => Value::Str(raw.to_string()),
        ValueType::Profile => {
            if let Err(e) = Profile1D::parse(raw) {
                return Err(match e {
                    ProfileError::Expr(ex) => ConfigError::ParseError {
                        line,
                        column: column + raw.find(':').map_or(0, |i| i + 1) + ex.column - 1,
                        message: format!("in profile expression: {}", ex.message),
                    },
                    other => ConfigError::ParseError {
                        line,
                        column,
                        message: other.to_string(),
                    },
                });
            }
            Value::Str(raw.to_string())
        }
        ValueType::FloatList => {
            let vs: Option<Vec<f64>> = raw.split(',').map(float).collect();
            Value::FloatList(vs.ok_or_else(type_error)?)
        }
    })
}

/// Parses configuration text, filling documented defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut command: Option<Command> = None;
    let mut current: Option<String> = None;
    let mut params = BTreeMap::new();
    let mut run = BTreeMap::new();

    for (idx, full) in text.lines().enumerate() {
        let line_no = idx + 1;
        let indent = full.chars().take_while(|c| c.is_whitespace()).count();
        let line = full.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::ParseError {
                    line: line_no,
                    column: indent + line.chars().count(),
                    message: "section header must end with ']'".into(),
                });
            };
            let name = name.trim();
            if name == "run" {
                current = Some("run".into());
                continue;
            }
            match Command::from_section(name) {
                Some(c) if command.is_none() => {
                    command = Some(c);
                    current = Some(name.to_string());
                }
                Some(_) => {
                    return Err(ConfigError::ParseError {
                        line: line_no,
                        column: indent + 2,
                        message: "only one command section is allowed".into(),
                    })
                }
                None => {
                    return Err(ConfigError::ParseError {
                        line: line_no,
                        column: indent + 2,
                        message: format!("unknown section [{name}]"),
                    })
                }
            }
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ConfigError::ParseError {
                line: line_no,
                column: indent + 1,
                message: "expected 'key = value'".into(),
            });
        };
        let Some(section) = current.clone() else {
            return Err(ConfigError::ParseError {
                line: line_no,
                column: indent + 1,
                message: "key outside of any section".into(),
            });
        };
        let name = line[..eq].trim();
        let raw = line[eq + 1..].trim();
        let value_column = indent + line[..eq + 1].chars().count() + 1 + (line[eq + 1..].chars().count() - line[eq + 1..].trim_start().chars().count());
        let (specs, target) = if section == "run" {
            (RUN, &mut run)
        } else {
            (command.expect("command section set").schema(), &mut params)
        };
        let Some(spec) = specs.iter().find(|s| s.name == name) else {
            return Err(ConfigError::UnknownKey {
                section,
                key: name.to_string(),
            });
        };
        if target.contains_key(name) {
            return Err(ConfigError::ParseError {
                line: line_no,
                column: indent + 1,
                message: format!("duplicate key '{name}'"),
            });
        }
        let v = parse_value(&section, name, spec.ty, raw, line_no, value_column)?;
        target.insert(name.to_string(), v);
    }

    let command = command.ok_or(ConfigError::ParseError {
        line: text.lines().count().max(1),
        column: 1,
        message: format!(
            "no command section; expected one of {}",
            Command::ALL.map(|c| format!("[{}]", c.section())).join(", ")
        ),
    })?;
    fill_defaults(command.section(), command.schema(), &mut params)?;
    fill_defaults("run", RUN, &mut run)?;
    Ok(RunConfig { command, params, run })
}

fn fill_defaults(section: &str, specs: &[KeySpec], map: &mut BTreeMap<String, Value>) -> Result<(), ConfigError> {
    for s in specs {
        if map.contains_key(s.name) {
            continue;
        }
        if let Some(d) = s.default {
            let v = parse_value(section, s.name, s.ty, d, 0, 0)?;
            map.insert(s.name.to_string(), v);
        }
    }
    Ok(())
}

impl RunConfig {
    /// Minimal configuration for `command` with every default filled.
    pub fn with_defaults(command: Command) -> Self {
        parse_config(&format!("[{}]\n", command.section())).expect("defaults are valid")
    }

    /// Serializes back to configuration text; parsing the result gives an
    /// equal configuration.
    pub fn to_text(&self) -> String {
        let mut out = format!("[{}]\n", self.command.section());
        for (k, v) in &self.params {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str("\n[run]\n");
        for (k, v) in &self.run {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        self.params.get(name).or_else(|| self.run.get(name))
    }

    fn wrong(&self, name: &str, expected: &'static str) -> ConfigError {
        ConfigError::TypeError {
            section: self.command.section().into(),
            key: name.into(),
            expected,
            found: self.lookup(name).map(|v| v.to_string()).unwrap_or_default(),
        }
    }

    fn missing(&self, name: &str) -> ConfigError {
        ConfigError::MissingKey {
            section: self.command.section().into(),
            key: name.into(),
        }
    }

    pub fn has(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn set(&mut self, name: &str, raw: &str) -> Result<(), ConfigError> {
        let (section, specs, target) = if RUN.iter().any(|s| s.name == name) {
            ("run", RUN, &mut self.run)
        } else {
            (self.command.section(), self.command.schema(), &mut self.params)
        };
        let spec = specs.iter().find(|s| s.name == name).ok_or_else(|| ConfigError::UnknownKey {
            section: section.into(),
            key: name.into(),
        })?;
        let v = parse_value(section, name, spec.ty, raw.trim(), 0, 0)?;
        target.insert(name.into(), v);
        Ok(())
    }

    pub fn f64(&self, name: &str) -> Result<f64, ConfigError> {
        match self.lookup(name) {
            Some(Value::Float(v)) => Ok(*v),
            Some(_) => Err(self.wrong(name, "a number")),
            None => Err(self.missing(name)),
        }
    }

    pub fn opt_f64(&self, name: &str) -> Result<Option<f64>, ConfigError> {
        if self.has(name) {
            self.f64(name).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize(&self, name: &str) -> Result<usize, ConfigError> {
        match self.lookup(name) {
            Some(Value::Int(v)) => usize::try_from(*v).map_err(|_| self.wrong(name, "an integer")),
            Some(_) => Err(self.wrong(name, "an integer")),
            None => Err(self.missing(name)),
        }
    }

    pub fn u64(&self, name: &str) -> Result<u64, ConfigError> {
        match self.lookup(name) {
            Some(Value::Int(v)) => Ok(*v),
            Some(_) => Err(self.wrong(name, "an integer")),
            None => Err(self.missing(name)),
        }
    }

    pub fn bool(&self, name: &str) -> Result<bool, ConfigError> {
        match self.lookup(name) {
            Some(Value::Bool(v)) => Ok(*v),
            Some(_) => Err(self.wrong(name, "a boolean")),
            None => Err(self.missing(name)),
        }
    }

    pub fn str(&self, name: &str) -> Result<&str, ConfigError> {
        match self.lookup(name) {
            Some(Value::Str(v)) => Ok(v),
            Some(_) => Err(self.wrong(name, "a string")),
            None => Err(self.missing(name)),
        }
    }

    pub fn opt_str(&self, name: &str) -> Result<Option<&str>, ConfigError> {
        if self.has(name) {
            self.str(name).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn list(&self, name: &str) -> Result<&[f64], ConfigError> {
        match self.lookup(name) {
            Some(Value::FloatList(v)) => Ok(v),
            Some(_) => Err(self.wrong(name, "a list of numbers")),
            None => Err(self.missing(name)),
        }
    }

    pub fn opt_list(&self, name: &str) -> Result<Option<&[f64]>, ConfigError> {
        if self.has(name) {
            self.list(name).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn profile(&self, name: &str) -> Result<Profile1D, ConfigError> {
        let raw = self.str(name)?;
        Profile1D::parse(raw).map_err(|e| ConfigError::UsageError(format!("{name}: {e}")))
    }

    pub fn seed(&self) -> u64 {
        self.u64("seed").unwrap_or(0)
    }
}

/// Markdown table of every section and key, used by `--help-config`.
pub fn describe_schema() -> String {
    let mut out = String::new();
    let mut sections: Vec<(&str, &[KeySpec])> = Command::ALL.iter().map(|c| (c.section(), c.schema())).collect();
    sections.push(("run", RUN));
    for (name, specs) in sections {
        out.push_str(&format!("[{name}]\n"));
        for s in specs {
            let d = s.default.unwrap_or("(optional)");
            out.push_str(&format!("  {:<16} {:<8} {:<22} {}\n", s.name, type_tag(s.ty), d, s.doc));
        }
        out.push('\n');
    }
    out
}

fn type_tag(t: ValueType) -> &'static str {
    match t {
        ValueType::Float => "float",
        ValueType::Int => "int",
        ValueType::Bool => "bool",
        ValueType::Str => "string",
        ValueType::Profile => "profile",
        ValueType::FloatList => "floats",
    }
}

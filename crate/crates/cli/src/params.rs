use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A flat parameter value: a number or a string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl ParamValue {
    /// Parses a `--set` right-hand side: numbers when they parse, text otherwise.
    pub fn parse(raw: &str) -> Self {
        match raw.trim().parse::<f64>() {
            Ok(v) => Self::Number(v),
            Err(_) => Self::Text(raw.to_string()),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Number(v) => write!(f, "{v}"),
            Self::Text(s) => write!(f, "'{s}'"),
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        Self::Number(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamKind {
    Int { min: i64, max: i64 },
    Float { min: f64, max: f64 },
    Choice(&'static [&'static str]),
}

/// Declared parameter of an experiment: key, admissible range and default.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: ParamKind,
    pub default: ParamValue,
}

impl ParamSpec {
    pub fn int(key: &'static str, default: i64, min: i64, max: i64) -> Self {
        Self { key, kind: ParamKind::Int { min, max }, default: ParamValue::Number(default as f64) }
    }

    pub fn float(key: &'static str, default: f64, min: f64, max: f64) -> Self {
        Self { key, kind: ParamKind::Float { min, max }, default: ParamValue::Number(default) }
    }

    pub fn choice(key: &'static str, default: &'static str, options: &'static [&'static str]) -> Self {
        Self { key, kind: ParamKind::Choice(options), default: ParamValue::Text(default.into()) }
    }

    /// The standard `seed` parameter, default 0.
    pub fn seed() -> Self {
        Self::int("seed", 0, 0, i64::from(u32::MAX))
    }

    fn describe(&self) -> String {
        match &self.kind {
            ParamKind::Int { min, max } => format!("integer in [{min}, {max}]"),
            ParamKind::Float { min, max } => format!("number in [{min:e}, {max:e}]"),
            ParamKind::Choice(options) => format!("one of {}", options.join(", ")),
        }
    }

    fn admits(&self, value: &ParamValue) -> bool {
        match (&self.kind, value) {
            (ParamKind::Int { min, max }, ParamValue::Number(v)) => {
                v.fract() == 0.0 && *v >= *min as f64 && *v <= *max as f64
            }
            (ParamKind::Float { min, max }, ParamValue::Number(v)) => v.is_finite() && v >= min && v <= max,
            (ParamKind::Choice(options), ParamValue::Text(s)) => options.contains(&s.as_str()),
            _ => false,
        }
    }
}

/// Validated parameters: every declared key present, defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Params(BTreeMap<String, ParamValue>);

impl Params {
    /// Merges `overrides` into the declared defaults. Unknown keys and
    /// out-of-range values are all collected into one error.
    pub fn resolve(
        experiment: &str,
        specs: &[ParamSpec],
        overrides: &BTreeMap<String, ParamValue>,
    ) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, ParamValue> =
            specs.iter().map(|s| (s.key.to_string(), s.default.clone())).collect();
        let mut offending = Vec::new();
        let mut problems = Vec::new();
        for (key, value) in overrides {
            match specs.iter().find(|s| s.key == key) {
                None => {
                    offending.push(key.clone());
                    problems.push(format!("unknown key '{key}'"));
                }
                Some(spec) if !spec.admits(value) => {
                    offending.push(key.clone());
                    problems.push(format!("{key} = {value} (expected {})", spec.describe()));
                }
                Some(_) => {
                    values.insert(key.clone(), value.clone());
                }
            }
        }
        if offending.is_empty() {
            return Ok(Self(values));
        }
        let accepted: Vec<&str> = specs.iter().map(|s| s.key).collect();
        Err(CliError::InvalidParams {
            experiment: experiment.to_string(),
            details: format!(
                "{}; offending keys: [{}]; accepted keys: [{}]",
                problems.join("; "),
                offending.join(", "),
                accepted.join(", ")
            ),
            offending,
        })
    }

    pub fn entries(&self) -> &BTreeMap<String, ParamValue> {
        &self.0
    }

    fn number(&self, key: &str) -> f64 {
        match self.0.get(key) {
            Some(ParamValue::Number(v)) => *v,
            other => panic!("parameter '{key}' is not a declared number: {other:?}"),
        }
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.number(key)
    }

    pub fn usize(&self, key: &str) -> usize {
        self.number(key) as usize
    }

    pub fn u64(&self, key: &str) -> u64 {
        self.number(key) as u64
    }

    pub fn text(&self, key: &str) -> &str {
        match self.0.get(key) {
            Some(ParamValue::Text(s)) => s,
            other => panic!("parameter '{key}' is not a declared choice: {other:?}"),
        }
    }
}

/// Parses `key=value`.
pub fn parse_assignment(raw: &str) -> Result<(String, ParamValue), CliError> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected key=value, got '{raw}'")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Config(format!("empty key in '{raw}'")));
    }
    Ok((key.to_string(), ParamValue::parse(value)))
}

/// Reads a flat JSON object of parameters.
pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, ParamValue>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!("{}: expected a flat JSON object of numbers and strings ({e})", path.display()))
    })
}

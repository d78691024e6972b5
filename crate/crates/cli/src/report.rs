use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::params::ParamValue;

/// How a check compares its value with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value| <= tolerance`.
    AbsAtMost,
    /// `value <= tolerance`.
    AtMost,
    /// `value >= tolerance`.
    AtLeast,
}

impl Comparison {
    pub fn holds(self, value: f64, tolerance: f64) -> bool {
        match self {
            Self::AbsAtMost => value.abs() <= tolerance,
            Self::AtMost => value <= tolerance,
            Self::AtLeast => value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
}

impl Check {
    /// NaN values fail every comparison.
    pub fn new(id: &str, value: f64, tolerance: f64, comparison: Comparison) -> Self {
        Self { id: id.to_string(), passed: comparison.holds(value, tolerance), value, tolerance, comparison }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub params: BTreeMap<String, ParamValue>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check, `PASS`/`FAIL` first.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let op = match c.comparison {
                Comparison::AbsAtMost => "|v| <=",
                Comparison::AtMost => "v <=",
                Comparison::AtLeast => "v >=",
            };
            out.push_str(&format!(
                "{} {}/{}: v = {:.3e} ({op} {:.1e})\n",
                if c.passed { "PASS" } else { "FAIL" },
                self.name,
                c.id,
                c.value,
                c.tolerance
            ));
        }
        out
    }
}

/// Accumulates metrics, checks and side files while an experiment runs.
#[derive(Debug, Default)]
pub struct Recorder {
    pub(crate) metrics: BTreeMap<String, f64>,
    pub(crate) checks: Vec<Check>,
    pub(crate) artifacts: Vec<(String, String)>,
}

impl Recorder {
    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    /// Records `value` as a metric under `id` and adds the check.
    pub fn check(&mut self, id: &str, value: f64, tolerance: f64, comparison: Comparison) {
        self.metric(id, value);
        self.checks.push(Check::new(id, value, tolerance, comparison));
    }

    pub fn at_most(&mut self, id: &str, value: f64, tolerance: f64) {
        self.check(id, value, tolerance, Comparison::AbsAtMost);
    }

    pub fn at_least(&mut self, id: &str, value: f64, tolerance: f64) {
        self.check(id, value, tolerance, Comparison::AtLeast);
    }

    /// Boolean check stored as `1` (true) or `0`, passing when true.
    pub fn flag(&mut self, id: &str, holds: bool) {
        self.check(id, if holds { 1.0 } else { 0.0 }, 1.0, Comparison::AtLeast);
    }

    /// Side file `<experiment>.<suffix>` written next to the report.
    pub fn artifact(&mut self, suffix: &str, contents: String) {
        self.artifacts.push((suffix.to_string(), contents));
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn metrics(&self) -> &BTreeMap<String, f64> {
        &self.metrics
    }
}

//! Experiment runner for `skewlab`: named, deterministic experiments with
//! flat key/value parameters, JSON reports and CSV side files.

pub mod error;
pub mod experiments;
pub mod params;
pub mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use error::{CliError, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_USAGE};
pub use experiments::{list_experiments, ExperimentInfo};
pub use params::{ParamSpec, ParamValue, Params};
pub use report::{Check, Comparison, Recorder, Report};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub params: BTreeMap<String, ParamValue>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(name: &str, output_dir: impl Into<PathBuf>) -> Self {
        Self { name: name.to_string(), params: BTreeMap::new(), output_dir: output_dir.into() }
    }

    pub fn set(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Path of the report written by [`run`].
pub fn report_path(output_dir: &Path, name: &str) -> PathBuf {
    output_dir.join(format!("{name}.report.json"))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Validates the parameters, runs the experiment, and writes
/// `<output_dir>/<name>.report.json` plus `<name>.<suffix>` side files.
pub fn run(config: &ExperimentConfig) -> Result<Report, CliError> {
    let experiment = experiments::find(&config.name).ok_or_else(|| CliError::UnknownExperiment {
        name: config.name.clone(),
        available: experiments::registry().iter().map(|e| e.name).collect::<Vec<_>>().join(", "),
    })?;
    let params = Params::resolve(experiment.name, &(experiment.params)(), &config.params)?;
    let start = Instant::now();
    let mut rec = Recorder::default();
    (experiment.run)(&params, &mut rec)
        .map_err(|source| CliError::Experiment { experiment: experiment.name.to_string(), source })?;
    let report = Report {
        name: experiment.name.to_string(),
        params: params.entries().clone(),
        metrics: rec.metrics,
        checks: rec.checks,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    for (suffix, contents) in &rec.artifacts {
        write(&dir.join(format!("{}.{suffix}", experiment.name)), contents)?;
    }
    write(&report_path(dir, experiment.name), &report.to_json())?;
    Ok(report)
}

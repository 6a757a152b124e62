//! Config-driven runner for the polariton Bloch-oscillation scenarios.

pub mod config;
pub mod output;
pub mod scenario;
pub mod summary;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{override_key, parse_config, ConfigError, OutputFormat, Scenario, ScenarioConfig};
use crate::output::{OutputError, OutputWriter};
use crate::scenario::run_scenario;
use crate::summary::{Provenance, RunSummary};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "POLARITON_BLOCH_OUT";
pub const DEFAULT_OUT_DIR: &str = "polariton-output";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{scenario} failed: {source}")]
    Engine {
        scenario: Scenario,
        #[source]
        source: polariton_core::Error,
    },
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Usage(_) => EXIT_CONFIG,
            RunError::Engine { .. } => EXIT_CHECK_FAILED,
            RunError::Output(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: RunSummary,
    pub out_dir: PathBuf,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

/// Output directory: explicit flag, then `[output].directory`, then the
/// environment variable, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(flag: Option<&Path>, config: &ScenarioConfig, env: Option<String>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.output.directory.as_ref().map(PathBuf::from))
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs the scenario and writes its artifacts and `summary.json`. On any
/// error the files written so far are removed.
pub fn execute(request: &RunRequest) -> Result<RunReport, RunError> {
    let scenario = request.scenario;
    log::info!("running {scenario} into {}", request.out_dir.display());
    let (derived, outcome) =
        run_scenario(scenario, &request.config).map_err(|source| RunError::Engine { scenario, source })?;

    let mut writer = OutputWriter::create(&request.out_dir)?;
    let mut files = Vec::new();
    for artifact in &outcome.artifacts {
        match writer.write_artifact(artifact, request.format) {
            Ok(names) => files.extend(names),
            Err(e) => {
                writer.rollback();
                return Err(e.into());
            }
        }
    }
    let summary = RunSummary {
        scenario: scenario.to_string(),
        frequency_convention: request.config.convention().as_str().into(),
        derived,
        checks: outcome.checks,
        results: outcome.results,
        labels: outcome.labels,
        artifacts: files,
        provenance: Provenance::new(&request.config, request.seed),
    };
    if let Err(e) = writer.write_summary(&summary) {
        writer.rollback();
        return Err(e.into());
    }
    Ok(RunReport { summary, out_dir: request.out_dir.clone() })
}

/// A `key=start:stop:steps` sweep over one configuration key.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<toml::Value>,
}

impl Sweep {
    pub fn parse(spec: &str) -> Result<Self, RunError> {
        let bad = || RunError::Usage(format!("sweep `{spec}` must look like key=start:stop:steps"));
        let (key, range) = spec.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else { return Err(bad()) };
        let steps: usize = steps.parse().map_err(|_| bad())?;
        if steps == 0 || key.is_empty() {
            return Err(bad());
        }
        let values = match (start.parse::<i64>(), stop.parse::<i64>()) {
            (Ok(a), Ok(b)) if steps == 1 || (b - a) % (steps as i64 - 1) == 0 => (0..steps as i64)
                .map(|i| toml::Value::Integer(if steps == 1 { a } else { a + i * (b - a) / (steps as i64 - 1) }))
                .collect(),
            _ => {
                let a: f64 = start.parse().map_err(|_| bad())?;
                let b: f64 = stop.parse().map_err(|_| bad())?;
                (0..steps)
                    .map(|i| {
                        let f = if steps == 1 { 0.0 } else { i as f64 / (steps - 1) as f64 };
                        toml::Value::Float(a + f * (b - a))
                    })
                    .collect()
            }
        };
        Ok(Self { key: key.to_string(), values })
    }
}

/// Runs every sweep point in its own `sweep_NNN` subdirectory, concurrently.
pub fn execute_sweep(
    base_text: &str,
    sweep: &Sweep,
    scenario: Scenario,
    out_dir: &Path,
    format: OutputFormat,
    seed: Option<u64>,
) -> Vec<(toml::Value, Result<RunReport, RunError>)> {
    sweep
        .values
        .par_iter()
        .enumerate()
        .map(|(i, value)| {
            let result = override_key(base_text, &sweep.key, value.clone())
                .and_then(|text| parse_config(&text))
                .map_err(RunError::from)
                .and_then(|config| {
                    execute(&RunRequest {
                        config,
                        scenario,
                        out_dir: out_dir.join(format!("sweep_{i:03}")),
                        format,
                        seed,
                    })
                });
            (value.clone(), result)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s = Sweep::parse("lattice.v0_khz=50:100:3").unwrap();
        assert_eq!(s.key, "lattice.v0_khz");
        assert_eq!(s.values, vec![toml::Value::Integer(50), toml::Value::Integer(75), toml::Value::Integer(100)]);
        let s = Sweep::parse("simulation.sigma=1e-4:2e-4:2").unwrap();
        assert_eq!(s.values, vec![toml::Value::Float(1e-4), toml::Value::Float(2e-4)]);
        let s = Sweep::parse("lattice.v0_khz=50:61:3").unwrap();
        assert_eq!(s.values[1], toml::Value::Float(55.5));
        // integer points still deserialise into float keys
        let text = override_key("", "lattice.v0_khz", toml::Value::Integer(75)).unwrap();
        assert_eq!(parse_config(&text).unwrap().lattice.v0_khz, 75.0);
        assert!(Sweep::parse("nope").is_err());
        assert!(Sweep::parse("a=1:2").is_err());
        assert!(Sweep::parse("a=1:2:0").is_err());
    }

    #[test]
    fn out_dir_precedence() {
        let mut c = parse_config("").unwrap();
        let env = || Some("from-env".to_string());
        assert_eq!(resolve_out_dir(None, &c, None), PathBuf::from(DEFAULT_OUT_DIR));
        assert_eq!(resolve_out_dir(None, &c, env()), PathBuf::from("from-env"));
        c.output.directory = Some("from-config".into());
        assert_eq!(resolve_out_dir(None, &c, env()), PathBuf::from("from-config"));
        assert_eq!(resolve_out_dir(Some(Path::new("flag")), &c, env()), PathBuf::from("flag"));
    }

    #[test]
    fn engine_errors_leave_no_files() {
        let dir = tempfile::tempdir().unwrap();
        // a lattice far too small for the packet
        let config = parse_config("[simulation]\nn_sites = 11\n").unwrap();
        let request = RunRequest {
            config,
            scenario: Scenario::BlochOscillation,
            out_dir: dir.path().join("run"),
            format: OutputFormat::Both,
            seed: None,
        };
        let err = execute(&request).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CHECK_FAILED);
        let leftover = std::fs::read_dir(dir.path()).map(|d| d.count()).unwrap_or(0);
        assert_eq!(leftover, 0);
    }
}

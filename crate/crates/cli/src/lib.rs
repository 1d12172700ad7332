//! Batch experiment runner: loads a configuration, runs one experiment and
//! writes CSV tables plus a JSON summary into an output directory.

pub mod config;
mod experiments;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub use config::Config;

/// Version of the `summary.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Output directory used when neither `--out` nor the environment override
/// is given.
pub const DEFAULT_OUT_DIR: &str = "results";

/// Environment variable that overrides the default output directory.
pub const OUT_DIR_ENV: &str = "V2I_RADAR_OUT";

/// The configuration shipped with the binary.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    GolayCheck,
    RadarChain,
    PlannerSweep,
    RateSweep,
    Misalignment,
    Overhead,
    ReproducePaper,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::GolayCheck,
        Experiment::RadarChain,
        Experiment::PlannerSweep,
        Experiment::RateSweep,
        Experiment::Misalignment,
        Experiment::Overhead,
        Experiment::ReproducePaper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::GolayCheck => "golay-check",
            Experiment::RadarChain => "radar-chain",
            Experiment::PlannerSweep => "planner-sweep",
            Experiment::RateSweep => "rate-sweep",
            Experiment::Misalignment => "misalignment",
            Experiment::Overhead => "overhead",
            Experiment::ReproducePaper => "reproduce-paper",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
                format!(
                    "unknown experiment '{s}', expected one of: {}",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub experiment: Experiment,
    /// `None` runs with the shipped default configuration.
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Overrides the configuration seed.
    pub seed: Option<u64>,
    /// Overrides the configuration Monte Carlo trial count.
    pub trials: Option<usize>,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: usize,
    pub files: Vec<String>,
    pub headline: BTreeMap<String, serde_json::Value>,
    /// Constraint violations of counter-example plans (expected, not errors).
    pub notes: Vec<String>,
}

impl Summary {
    pub fn number(&self, key: &str) -> Option<f64> {
        self.headline.get(key).and_then(serde_json::Value::as_f64)
    }
}

/// Resolve the output directory: explicit flag, then environment override,
/// then [`DEFAULT_OUT_DIR`].
pub fn resolve_output_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

pub fn load_config(path: Option<&PathBuf>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Config::from_toml(DEFAULT_CONFIG).context("in the built-in default config"),
    }
}

pub fn run(spec: &RunSpec) -> Result<Summary> {
    let mut cfg = load_config(spec.config_path.as_ref())?;
    if let Some(seed) = spec.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = spec.trials {
        cfg.trials = trials;
    }
    if cfg.trials == 0 {
        bail!("trials must be at least 1");
    }
    fs::create_dir_all(&spec.output_dir)
        .with_context(|| format!("creating output directory {}", spec.output_dir.display()))?;

    let mut ctx = experiments::Context::new(&cfg, spec.output_dir.clone());
    match spec.experiment {
        Experiment::GolayCheck => experiments::golay_check(&mut ctx)?,
        Experiment::RadarChain => experiments::radar_chain(&mut ctx)?,
        Experiment::PlannerSweep => experiments::planner_sweep(&mut ctx)?,
        Experiment::RateSweep => experiments::rate_sweep(&mut ctx)?,
        Experiment::Misalignment => experiments::misalignment(&mut ctx)?,
        Experiment::Overhead => experiments::overhead(&mut ctx)?,
        Experiment::ReproducePaper => {
            experiments::golay_check(&mut ctx)?;
            experiments::radar_chain(&mut ctx)?;
            experiments::planner_sweep(&mut ctx)?;
            experiments::rate_sweep(&mut ctx)?;
            experiments::misalignment(&mut ctx)?;
            experiments::overhead(&mut ctx)?;
        }
    }

    let (files, headline, notes) = ctx.finish();
    let mut summary = Summary {
        schema_version: SCHEMA_VERSION,
        experiment: spec.experiment,
        seed: cfg.seed,
        trials: cfg.trials,
        files,
        headline,
        notes,
    };
    summary.files.push("summary.json".into());
    let path = spec.output_dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(summary)
}

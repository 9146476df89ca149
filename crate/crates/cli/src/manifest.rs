//! Fully resolved command descriptions and the manifest written beside every output.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wged::montecarlo::SimConfig;
use wged::CensoringScheme;

use crate::config::EstimateConfig;
use crate::error::{CliError, CliResult};

/// Which loss columns `estimate` reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum LossChoice {
    /// Squared error and LINEX with the per-target shapes of the config.
    All,
    SquaredOnly,
    /// LINEX only, with this shape for every target.
    Linex(f64),
}

impl fmt::Display for LossChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossChoice::All => f.write_str("all"),
            LossChoice::SquaredOnly => f.write_str("self"),
            LossChoice::Linex(q) => write!(f, "linex:{}", q),
        }
    }
}

impl FromStr for LossChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(LossChoice::All),
            "self" => Ok(LossChoice::SquaredOnly),
            other => {
                let q = other
                    .strip_prefix("linex:")
                    .ok_or_else(|| format!("loss must be all, self or linex:q, got {:?}", s))?;
                let q: f64 = q.parse().map_err(|_| format!("bad LINEX shape in {:?}", s))?;
                if q == 0.0 || !q.is_finite() {
                    return Err(format!("LINEX shape must be finite and nonzero, got {}", q));
                }
                Ok(LossChoice::Linex(q))
            }
        }
    }
}

impl From<LossChoice> for String {
    fn from(l: LossChoice) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for LossChoice {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRun {
    /// `builtin:electric` or the data file path as given.
    pub source: String,
    pub times: Vec<f64>,
    pub schemes: Vec<CensoringScheme>,
    pub settings: EstimateConfig,
    pub methods: String,
    pub loss: LossChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRun {
    pub config: SimConfig,
    /// Recorded for information; results do not depend on it.
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorems,
    Table2,
    Oracles,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Theorems => "theorems",
            Suite::Table2 => "table2",
            Suite::Oracles => "oracles",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRun {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
}

/// A command with every default and override resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "config", rename_all = "lowercase")]
pub enum RunSpec {
    Estimate(EstimateRun),
    Simulate(SimulateRun),
    Verify(VerifyRun),
}

impl RunSpec {
    pub fn seed(&self) -> Option<u64> {
        match self {
            RunSpec::Estimate(_) => None,
            RunSpec::Simulate(s) => Some(s.config.master_seed),
            RunSpec::Verify(v) => Some(v.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub run: RunSpec,
    pub seed: Option<u64>,
    pub tool: String,
    pub version: String,
    pub wall_clock_secs: f64,
    /// File names relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub const FILE_NAME: &'static str = "manifest.json";

    pub fn new(run: RunSpec, wall_clock_secs: f64, outputs: Vec<String>) -> Self {
        Self {
            seed: run.seed(),
            run,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_secs,
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join(Self::FILE_NAME);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}

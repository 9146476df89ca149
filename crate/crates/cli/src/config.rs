//! Analysis settings for `estimate`, and JSON loading for both bundled configs.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wged::distribution::{KnownShape, SystemQuery};
use wged::electric;
use wged::estimators::{EstimationSetup, EstimatorNumerics, GammaPrior, HyperPrior, Target};
use wged::montecarlo::{LossQs, SystemTarget, Targets};

use crate::error::{CliError, CliResult};

/// Everything `estimate` needs besides the data and the censoring plans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub lambda: f64,
    pub theta: f64,
    pub prior: GammaPrior<f64>,
    pub hyper: HyperPrior<f64>,
    pub loss_qs: LossQs,
    pub targets: Targets,
}

impl Default for EstimateConfig {
    /// The insulating-fluid analysis settings.
    fn default() -> Self {
        let system = SystemTarget {
            t: electric::T_SYSTEM,
            k: electric::K_SYSTEM,
        };
        Self {
            lambda: electric::LAMBDA,
            theta: electric::THETA,
            prior: GammaPrior {
                a: electric::A,
                b: electric::B,
            },
            hyper: HyperPrior {
                u: electric::U,
                v: electric::V,
                c: electric::C,
            },
            loss_qs: LossQs {
                alpha: electric::Q_ALPHA,
                series: electric::Q_RELIABILITY,
                parallel: electric::Q_RELIABILITY,
                hazard: electric::Q_ALPHA,
            },
            targets: Targets {
                series: system,
                parallel: system,
                hazard_t: electric::T_HAZARD,
            },
        }
    }
}

impl EstimateConfig {
    /// Validates every field and builds the estimator settings.
    pub fn setup(&self) -> CliResult<EstimationSetup<f64>> {
        let linex_q = Target::ALL.map(|t| self.loss_qs.get(t));
        if let Some(t) = Target::ALL.iter().find(|t| !(linex_q[t.index()] != 0.0 && linex_q[t.index()].is_finite())) {
            return Err(CliError::Input(format!("LINEX shape for {} must be finite and nonzero", t)));
        }
        if !(self.targets.hazard_t > 0.0) {
            return Err(CliError::Input("hazard time must be positive".into()));
        }
        Ok(EstimationSetup {
            known: KnownShape::new(self.lambda, self.theta)?,
            prior: GammaPrior::new(self.prior.a, self.prior.b)?,
            hyper: HyperPrior::new(self.hyper.u, self.hyper.v, self.hyper.c)?,
            linex_q,
            series: SystemQuery::series(self.targets.series.t, self.targets.series.k)?,
            parallel: SystemQuery::parallel(self.targets.parallel.t, self.targets.parallel.k)?,
            t_hazard: self.targets.hazard_t,
            numerics: EstimatorNumerics::default(),
        })
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Reads a JSON document, naming the file (and line, when known) on failure.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: line {}: {}", path.display(), e.line(), e)))
}

/// Parses `"x,y"` or `"x,y,z"` style numeric lists for flags like `--prior`.
pub fn parse_list<const N: usize>(flag: &str, text: &str) -> CliResult<[f64; N]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(CliError::Input(format!("{} expects {} comma-separated numbers, got {:?}", flag, N, text)));
    }
    let mut out = [0.0; N];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| CliError::Input(format!("{}: {:?} is not a number", flag, p)))?;
    }
    Ok(out)
}

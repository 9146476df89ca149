//! Monte Carlo comparison of the estimators.
//!
//! For each censoring scheme, `N` censored samples are drawn at fixed true
//! parameters, all nine estimators are evaluated for every target, and the
//! mean estimate and mean squared error are tabulated.
//!
//! Replication `r` of scheme `s` draws from its own ChaCha stream, selected by
//! `(master_seed, s, r)`, and the per-replication results are reduced after
//! sorting, so the table is bit-identical for any worker count and any
//! permutation of replication order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Beta, Distribution, Gamma, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censoring::{generate_sample, CensoringScheme};
use crate::distribution::{KnownShape, SystemQuery, Topology, WgedParams};
use crate::error::{Result, WgedError};
use crate::estimators::{
    estimate_all, Estimator, EstimationSetup, EstimatorNumerics, GammaPrior, HyperPrior, MethodSet, Target,
};
use crate::scalar::CompensatedSum;

/// LINEX shape for each target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossQs {
    pub alpha: f64,
    pub series: f64,
    pub parallel: f64,
    pub hazard: f64,
}

impl LossQs {
    fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.series, self.parallel, self.hazard]
    }

    pub fn get(&self, target: Target) -> f64 {
        self.as_array()[target.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemTarget {
    pub t: f64,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub series: SystemTarget,
    pub parallel: SystemTarget,
    pub hazard_t: f64,
}

/// A simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub true_params: WgedParams<f64>,
    pub prior: GammaPrior<f64>,
    pub hyper: HyperPrior<f64>,
    pub schemes: Vec<CensoringScheme>,
    pub loss_qs: LossQs,
    pub targets: Targets,
    pub replications: usize,
    pub master_seed: u64,
    /// Draw `(a, b, α)` from the priors for every replication instead of
    /// holding `α` at `true_params.alpha`.
    #[serde(default)]
    pub redraw_truth: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        WgedParams::new(self.true_params.alpha, self.true_params.lambda, self.true_params.theta)?;
        GammaPrior::new(self.prior.a, self.prior.b)?;
        HyperPrior::new(self.hyper.u, self.hyper.v, self.hyper.c)?;
        if self.replications == 0 {
            return Err(WgedError::domain("replications must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(WgedError::domain("at least one censoring scheme is required"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            CensoringScheme::new(s.n(), s.removals().to_vec()).map_err(|e| e.context(format!("scheme #{}", i + 1)))?;
        }
        self.setup()?;
        Ok(())
    }

    /// The estimator settings shared by every replication.
    pub fn setup(&self) -> Result<EstimationSetup<f64>> {
        for target in Target::ALL {
            let q = self.loss_qs.get(target);
            if q == 0.0 || !q.is_finite() {
                return Err(WgedError::LossDomain(format!("LINEX shape for {} must be nonzero", target)));
            }
        }
        if !(self.targets.hazard_t > 0.0) {
            return Err(WgedError::domain("hazard time must be positive"));
        }
        Ok(EstimationSetup {
            known: KnownShape::new(self.true_params.lambda, self.true_params.theta)?,
            prior: self.prior,
            hyper: self.hyper,
            linex_q: self.loss_qs.as_array(),
            series: SystemQuery::series(self.targets.series.t, self.targets.series.k)?,
            parallel: SystemQuery::parallel(self.targets.parallel.t, self.targets.parallel.k)?,
            t_hazard: self.targets.hazard_t,
            numerics: EstimatorNumerics::default(),
        })
    }

    /// True values of the four targets at the given `α`.
    pub fn truth(&self, alpha: f64) -> Result<[f64; 4]> {
        let p = self.true_params.with_alpha(alpha)?;
        let setup = self.setup()?;
        Ok([
            alpha,
            p.reliability_system(&setup.series)?,
            p.reliability_system(&setup.parallel)?,
            p.hazard(self.targets.hazard_t)?,
        ])
    }
}

/// Mean estimate and MSE of one estimator for one target under one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseRow {
    pub scheme: CensoringScheme,
    pub estimator: Estimator,
    pub target: Target,
    /// `self`, `linex:q`, or `-` for the MLE.
    pub loss: String,
    pub mean: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseTable {
    pub replications: usize,
    /// Rows ordered by scheme (config order), target, then estimator column order.
    pub rows: Vec<MseRow>,
}

impl MseTable {
    pub fn get(&self, scheme: &CensoringScheme, target: Target, estimator: Estimator) -> Option<&MseRow> {
        self.rows
            .iter()
            .find(|r| &r.scheme == scheme && r.target == target && r.estimator == estimator)
    }

    pub fn schemes(&self) -> Vec<CensoringScheme> {
        let mut out: Vec<CensoringScheme> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.scheme) {
                out.push(r.scheme.clone());
            }
        }
        out
    }
}

/// Estimates and true values from one replication, `[target][estimator]`.
#[derive(Debug, Clone, Copy)]
struct Replicate {
    estimates: [[f64; 9]; 4],
    truth: [f64; 4],
}

/// Stream selector for one replication: scheme index in the high bits.
fn stream_id(scheme: usize, rep: usize) -> u64 {
    ((scheme as u64) << 40) | rep as u64
}

fn run_replicate(config: &SimConfig, setup: &EstimationSetup<f64>, scheme_idx: usize, rep: usize) -> Result<Replicate> {
    let scheme = &config.schemes[scheme_idx];
    let mut rng = ChaCha20Rng::seed_from_u64(config.master_seed);
    rng.set_stream(stream_id(scheme_idx, rep));

    let alpha = if config.redraw_truth {
        let beta = Beta::new(config.hyper.u, config.hyper.v).map_err(|e| WgedError::domain(e.to_string()))?;
        let unif = Uniform::new(0.0, config.hyper.c).map_err(|e| WgedError::domain(e.to_string()))?;
        loop {
            let a = beta.sample(&mut rng);
            let b = unif.sample(&mut rng);
            if !(a > 0.0 && b > 0.0) {
                continue;
            }
            let gamma = Gamma::new(a, 1.0 / b).map_err(|e| WgedError::domain(e.to_string()))?;
            let alpha: f64 = gamma.sample(&mut rng);
            if alpha > 0.0 && alpha.is_finite() {
                break alpha;
            }
        }
    } else {
        config.true_params.alpha
    };
    let params = config.true_params.with_alpha(alpha)?;
    let truth = config.truth(alpha)?;

    let sample = generate_sample(scheme, |p| params.quantile(p), &mut rng)?;
    let summary = sample.summary(params.lambda, params.theta)?;
    let grid = estimate_all(&summary, setup, MethodSet::ALL)?;
    let mut estimates = [[0.0; 9]; 4];
    for target in Target::ALL {
        for est in Estimator::ALL {
            estimates[target.index()][est.index()] = grid
                .get(target, est)
                .ok_or_else(|| WgedError::NumericalIntegrity(format!("{} {} missing", est, target)))?;
        }
    }
    Ok(Replicate { estimates, truth })
}

/// Sum of values after sorting, so the result does not depend on their order.
fn order_free_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.into_iter().collect::<CompensatedSum<f64>>().value()
}

/// Runs the study on `workers` threads (`0` means rayon's default).
pub fn run_simulation(config: &SimConfig, workers: usize) -> Result<MseTable> {
    config.validate()?;
    let setup = config.setup()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| WgedError::domain(format!("cannot start worker pool: {}", e)))?;

    let n = config.replications;
    let mut rows = Vec::with_capacity(config.schemes.len() * 36);
    for (si, scheme) in config.schemes.iter().enumerate() {
        let reps: Vec<Replicate> = pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(|r| {
                    run_replicate(config, &setup, si, r)
                        .map_err(|e| e.context(format!("scheme {} ({}), replication {}", si + 1, scheme.render(), r)))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for target in Target::ALL {
            let ti = target.index();
            for est in Estimator::ALL {
                let ei = est.index();
                let values: Vec<f64> = reps.iter().map(|r| r.estimates[ti][ei]).collect();
                let sq: Vec<f64> = reps
                    .iter()
                    .map(|r| {
                        let d = r.estimates[ti][ei] - r.truth[ti];
                        d * d
                    })
                    .collect();
                let loss = match est {
                    Estimator::Mle => "-".to_string(),
                    e if e.is_linex() => format!("linex:{}", config.loss_qs.get(target)),
                    _ => "self".to_string(),
                };
                rows.push(MseRow {
                    scheme: scheme.clone(),
                    estimator: est,
                    target,
                    loss,
                    mean: order_free_sum(values) / n as f64,
                    mse: order_free_sum(sq) / n as f64,
                });
            }
        }
    }
    Ok(MseTable { replications: n, rows })
}

/// The published MSE rankings: three E-Bayes estimators, then Bayes, then MLE.
pub const SELF_CHAIN: [Estimator; 5] = [
    Estimator::EbayesSelf(crate::estimators::PriorId::Increasing),
    Estimator::EbayesSelf(crate::estimators::PriorId::Uniform),
    Estimator::EbayesSelf(crate::estimators::PriorId::Decreasing),
    Estimator::BayesSelf,
    Estimator::Mle,
];

pub const LINEX_CHAIN: [Estimator; 5] = [
    Estimator::EbayesLinex(crate::estimators::PriorId::Increasing),
    Estimator::EbayesLinex(crate::estimators::PriorId::Uniform),
    Estimator::EbayesLinex(crate::estimators::PriorId::Decreasing),
    Estimator::BayesLinex,
    Estimator::Mle,
];

/// One link `MSE(lhs) < MSE(rhs)` of an ordering chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub scheme: CensoringScheme,
    pub target: Target,
    /// `self` or `linex`.
    pub chain: &'static str,
    pub lhs: Estimator,
    pub rhs: Estimator,
    pub lhs_mse: f64,
    pub rhs_mse: f64,
    pub holds: bool,
}

/// `MSE` at the larger `n` is below that at the smaller `n`, within one family
/// of schemes sharing the observed fraction `m/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneCheck {
    pub target: Target,
    pub estimator: Estimator,
    pub smaller: CensoringScheme,
    pub larger: CensoringScheme,
    pub smaller_mse: f64,
    pub larger_mse: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub links: Vec<ChainLink>,
    pub monotone: Vec<MonotoneCheck>,
}

impl OrderingReport {
    pub fn all_hold(&self) -> bool {
        self.links.iter().all(|l| l.holds) && self.monotone.iter().all(|m| m.holds)
    }

    pub fn failures(&self) -> usize {
        self.links.iter().filter(|l| !l.holds).count() + self.monotone.iter().filter(|m| !m.holds).count()
    }
}

/// Schemes grouped by equal `m/n`, each group sorted by `n`.
pub fn scheme_families(schemes: &[CensoringScheme]) -> Vec<Vec<CensoringScheme>> {
    let mut families: Vec<Vec<CensoringScheme>> = Vec::new();
    for s in schemes {
        let same = |f: &Vec<CensoringScheme>| f[0].m() * s.n() == s.m() * f[0].n();
        match families.iter_mut().find(|f| same(f)) {
            Some(f) => f.push(s.clone()),
            None => families.push(vec![s.clone()]),
        }
    }
    for f in &mut families {
        f.sort_by_key(|s| s.n());
    }
    families
}

/// Checks every chain link and every within-family monotone decrease present in the table.
pub fn verify_orderings(table: &MseTable) -> OrderingReport {
    let schemes = table.schemes();
    let mut links = Vec::new();
    for scheme in &schemes {
        for target in Target::ALL {
            for (name, chain) in [("self", &SELF_CHAIN), ("linex", &LINEX_CHAIN)] {
                for pair in chain.windows(2) {
                    let (Some(l), Some(r)) = (table.get(scheme, target, pair[0]), table.get(scheme, target, pair[1]))
                    else {
                        continue;
                    };
                    links.push(ChainLink {
                        scheme: scheme.clone(),
                        target,
                        chain: name,
                        lhs: pair[0],
                        rhs: pair[1],
                        lhs_mse: l.mse,
                        rhs_mse: r.mse,
                        holds: l.mse < r.mse,
                    });
                }
            }
        }
    }
    let mut monotone = Vec::new();
    for family in scheme_families(&schemes) {
        for pair in family.windows(2) {
            if pair[0].n() == pair[1].n() {
                continue;
            }
            for target in Target::ALL {
                for est in Estimator::ALL {
                    let (Some(a), Some(b)) = (table.get(&pair[0], target, est), table.get(&pair[1], target, est)) else {
                        continue;
                    };
                    monotone.push(MonotoneCheck {
                        target,
                        estimator: est,
                        smaller: pair[0].clone(),
                        larger: pair[1].clone(),
                        smaller_mse: a.mse,
                        larger_mse: b.mse,
                        holds: b.mse < a.mse,
                    });
                }
            }
        }
    }
    OrderingReport { links, monotone }
}

/// Topology of a reliability target; `None` for `α` and the hazard rate.
pub fn target_topology(target: Target) -> Option<Topology> {
    match target {
        Target::Series => Some(Topology::Series),
        Target::Parallel => Some(Topology::Parallel),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(schemes: &[(&str, usize)], reps: usize) -> SimConfig {
        SimConfig {
            true_params: WgedParams::new(0.9570615, 3.0, 2.5).unwrap(),
            prior: GammaPrior::new(0.4919733, 0.5308612).unwrap(),
            hyper: HyperPrior::new(0.13, 2.0, 1.12).unwrap(),
            schemes: schemes
                .iter()
                .map(|(s, n)| CensoringScheme::parse(s, *n).unwrap())
                .collect(),
            loss_qs: LossQs {
                alpha: 1.0,
                series: 2.0,
                parallel: 2.0,
                hazard: 1.0,
            },
            targets: Targets {
                series: SystemTarget { t: 0.1, k: 5 },
                parallel: SystemTarget { t: 0.25, k: 5 },
                hazard_t: 0.1,
            },
            replications: reps,
            master_seed: 11,
            redraw_truth: false,
        }
    }

    #[test]
    fn single_replication_mse_is_squared_error() {
        let cfg = config(&[("0*10", 10)], 1);
        let table = run_simulation(&cfg, 1).unwrap();
        let setup = cfg.setup().unwrap();
        let rep = run_replicate(&cfg, &setup, 0, 0).unwrap();
        for row in &table.rows {
            let est = rep.estimates[row.target.index()][row.estimator.index()];
            let d = est - rep.truth[row.target.index()];
            assert_eq!(row.mean, est);
            assert_eq!(row.mse, d * d);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = config(&[("2,0*9", 12)], 6);
        let a = run_simulation(&cfg, 1).unwrap();
        let b = run_simulation(&cfg, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn redraw_mode_runs() {
        let mut cfg = config(&[("0*8", 8)], 3);
        cfg.redraw_truth = true;
        let t = run_simulation(&cfg, 1).unwrap();
        assert!(t.rows.iter().all(|r| r.mse.is_finite() && r.mse >= 0.0));
    }

    #[test]
    fn families_group_by_fraction() {
        let schemes: Vec<_> = [("4,4,2,0*7", 20), ("0*20", 20), ("5*3,0*12", 30), ("0*30", 30)]
            .iter()
            .map(|(s, n)| CensoringScheme::parse(s, *n).unwrap())
            .collect();
        let fam = scheme_families(&schemes);
        assert_eq!(fam.len(), 2);
        assert_eq!(fam[0].len(), 2);
        assert_eq!(fam[0][1].n(), 30);
    }

    #[test]
    fn table_order_and_shape() {
        let cfg = config(&[("0*6", 6), ("1,0*4", 6)], 2);
        let t = run_simulation(&cfg, 1).unwrap();
        assert_eq!(t.rows.len(), 2 * 36);
        assert_eq!(t.rows[0].estimator, Estimator::Mle);
        assert_eq!(t.rows[8].estimator.label(), "EBL3");
        assert_eq!(t.rows[9].target, Target::Series);
        assert_eq!(t.rows[36].scheme, cfg.schemes[1]);
        let rep = verify_orderings(&t);
        assert_eq!(rep.links.len(), 2 * 4 * 8);
        assert!(rep.monotone.is_empty());
    }
}

//! Estimators of `α`, series/parallel system reliability and the hazard rate.
//!
//! Every estimator sees the data only through a [`SampleSummary`]. The
//! classical layer holds the MLE and the Bayes estimators under a gamma prior;
//! the E-Bayes layer averages the Bayes estimators over a hyperprior on the
//! gamma prior's `(a, b)`.

mod classical;
mod ebayes;

pub use classical::{
    bayes_alpha, bayes_hazard, bayes_reliability, mle_alpha, mle_derived, posterior_expectation, DerivedTarget,
};
pub use ebayes::{
    check_theorem_properties, ebayes_alpha, ebayes_alpha_linex, ebayes_alpha_self, ebayes_expectation,
    ebayes_hazard, ebayes_reliability, ebayes_reliability_linex, ebayes_reliability_self, EbayesTriple,
    HyperPrior, PriorId, TheoremReport, TripleCheck, GAP_RESOLUTION,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::censoring::SampleSummary;
use crate::distribution::{KnownShape, SystemQuery};
use crate::error::{Result, WgedError};
use crate::numerics::{log_gamma, QuadratureSpec, SeriesSpec};
use crate::scalar::Scalar;

/// Conjugate gamma prior `π(α) ∝ α^{a-1} e^{-bα}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> GammaPrior<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && a.is_finite() && b > T::zero() && b.is_finite()) {
            return Err(WgedError::domain(format!("gamma prior needs a, b > 0, got ({}, {})", a, b)));
        }
        Ok(Self { a, b })
    }
}

/// Squared-error loss, or LINEX loss with nonzero shape `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Loss<T> {
    #[serde(rename = "self")]
    Squared,
    Linex { q: T },
}

impl<T: Scalar> Loss<T> {
    pub fn linex(q: T) -> Result<Self> {
        if q == T::zero() || !q.is_finite() {
            return Err(WgedError::LossDomain(format!(
                "LINEX shape must be finite and nonzero, got {}",
                q
            )));
        }
        Ok(Self::Linex { q })
    }

    pub fn is_linex(&self) -> bool {
        matches!(self, Self::Linex { .. })
    }
}

impl<T: Scalar> fmt::Display for Loss<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Loss::Squared => f.write_str("self"),
            Loss::Linex { q } => write!(f, "linex:{}", q),
        }
    }
}

impl<T: Scalar> FromStr for Loss<T> {
    type Err = WgedError;

    /// `self` or `linex:q`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("self") {
            return Ok(Loss::Squared);
        }
        let q = s
            .strip_prefix("linex:")
            .ok_or_else(|| WgedError::Parse(format!("loss must be 'self' or 'linex:q', got {:?}", s)))?;
        let q: f64 = q
            .trim()
            .parse()
            .map_err(|_| WgedError::Parse(format!("bad LINEX shape {:?}", q)))?;
        Loss::linex(T::lit(q))
    }
}

/// Gamma posterior `Gamma(m + a, b + S_m)` of `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSummary<T> {
    pub shape: T,
    pub rate: T,
}

impl<T: Scalar> PosteriorSummary<T> {
    pub fn new(summary: &SampleSummary<T>, prior: &GammaPrior<T>) -> Self {
        Self {
            shape: summary.m_scalar() + prior.a,
            rate: prior.b + summary.s_m,
        }
    }

    pub fn mean(&self) -> T {
        self.shape / self.rate
    }

    /// Log of the normalizing constant `rate^shape / Γ(shape)`.
    pub fn log_norm(&self) -> Result<T> {
        Ok(self.shape * self.rate.ln() - log_gamma(self.shape)?)
    }

    pub fn log_density(&self, alpha: T, log_norm: T) -> T {
        log_norm + (self.shape - T::one()) * alpha.ln() - self.rate * alpha
    }
}

/// A quantity being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Alpha,
    Series,
    Parallel,
    Hazard,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::Alpha, Target::Series, Target::Parallel, Target::Hazard];

    pub fn label(&self) -> &'static str {
        match self {
            Target::Alpha => "alpha",
            Target::Series => "series",
            Target::Parallel => "parallel",
            Target::Hazard => "hazard",
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One of the nine estimators, in the customary column order. Serializes
/// as its column label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum Estimator {
    Mle,
    BayesSelf,
    BayesLinex,
    EbayesSelf(PriorId),
    EbayesLinex(PriorId),
}

impl Estimator {
    pub const ALL: [Estimator; 9] = [
        Estimator::Mle,
        Estimator::BayesSelf,
        Estimator::BayesLinex,
        Estimator::EbayesSelf(PriorId::Uniform),
        Estimator::EbayesLinex(PriorId::Uniform),
        Estimator::EbayesSelf(PriorId::Decreasing),
        Estimator::EbayesLinex(PriorId::Decreasing),
        Estimator::EbayesSelf(PriorId::Increasing),
        Estimator::EbayesLinex(PriorId::Increasing),
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Estimator::Mle => "MLE",
            Estimator::BayesSelf => "BS",
            Estimator::BayesLinex => "BL",
            Estimator::EbayesSelf(PriorId::Uniform) => "EBS1",
            Estimator::EbayesLinex(PriorId::Uniform) => "EBL1",
            Estimator::EbayesSelf(PriorId::Decreasing) => "EBS2",
            Estimator::EbayesLinex(PriorId::Decreasing) => "EBL2",
            Estimator::EbayesSelf(PriorId::Increasing) => "EBS3",
            Estimator::EbayesLinex(PriorId::Increasing) => "EBL3",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|e| e.label().eq_ignore_ascii_case(label))
    }

    /// Position in [`Estimator::ALL`].
    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|e| e == self).expect("every estimator is listed")
    }

    pub fn is_linex(&self) -> bool {
        matches!(self, Estimator::BayesLinex | Estimator::EbayesLinex(_))
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl From<Estimator> for &'static str {
    fn from(e: Estimator) -> Self {
        e.label()
    }
}

impl TryFrom<String> for Estimator {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        Estimator::from_label(&s).ok_or_else(|| format!("unknown estimator {:?}", s))
    }
}

/// Tolerances for the nested integrals and series used by the estimators.
#[derive(Debug, Clone)]
pub struct EstimatorNumerics<T> {
    /// The beta-weighted integral over `a`.
    pub outer: QuadratureSpec<T>,
    /// The integral over `b ∈ (0, c)`.
    pub middle: QuadratureSpec<T>,
    /// Posterior integrals over `α`.
    pub inner: QuadratureSpec<T>,
    pub series: SeriesSpec<T>,
}

impl<T: Scalar> Default for EstimatorNumerics<T> {
    fn default() -> Self {
        let tiny = T::lit(1e-13);
        Self {
            // 16 nodes on each side of a = 1/2, so 32 substituted nodes in all.
            outer: QuadratureSpec::new(tiny, T::lit(1e-9), 200, 16).expect("valid spec"),
            middle: QuadratureSpec::new(tiny, T::lit(1e-7), 200, 10).expect("valid spec"),
            inner: QuadratureSpec::new(tiny, T::lit(1e-8), 200, 64).expect("valid spec"),
            series: SeriesSpec::default(),
        }
    }
}

/// Everything besides the data needed to evaluate the full estimator grid.
#[derive(Debug, Clone)]
pub struct EstimationSetup<T> {
    pub known: KnownShape<T>,
    pub prior: GammaPrior<T>,
    pub hyper: HyperPrior<T>,
    /// LINEX shape per target, indexed by [`Target::index`].
    pub linex_q: [T; 4],
    pub series: SystemQuery<T>,
    pub parallel: SystemQuery<T>,
    pub t_hazard: T,
    pub numerics: EstimatorNumerics<T>,
}

impl<T: Scalar> EstimationSetup<T> {
    pub fn query(&self, target: Target) -> Option<&SystemQuery<T>> {
        match target {
            Target::Series => Some(&self.series),
            Target::Parallel => Some(&self.parallel),
            _ => None,
        }
    }

    pub fn loss_for(&self, target: Target, linex: bool) -> Result<Loss<T>> {
        if linex {
            Loss::linex(self.linex_q[target.index()])
        } else {
            Ok(Loss::Squared)
        }
    }
}

/// Estimates indexed by `[target][estimator]`; `None` where not requested.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateGrid<T> {
    pub values: [[Option<T>; 9]; 4],
}

impl<T: Scalar> EstimateGrid<T> {
    pub fn get(&self, target: Target, estimator: Estimator) -> Option<T> {
        self.values[target.index()][estimator.index()]
    }
}

/// Which estimator families to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSet {
    pub mle: bool,
    pub bayes: bool,
    pub ebayes: [bool; 3],
}

impl MethodSet {
    pub const ALL: MethodSet = MethodSet {
        mle: true,
        bayes: true,
        ebayes: [true; 3],
    };

    pub fn includes(&self, estimator: Estimator) -> bool {
        match estimator {
            Estimator::Mle => self.mle,
            Estimator::BayesSelf | Estimator::BayesLinex => self.bayes,
            Estimator::EbayesSelf(p) | Estimator::EbayesLinex(p) => self.ebayes[p.index()],
        }
    }

    fn any_ebayes(&self) -> bool {
        self.ebayes.iter().any(|&b| b)
    }
}

impl FromStr for MethodSet {
    type Err = WgedError;

    /// `all`, `mle`, `bayes`, `ebayes` or `ebayesN`, comma separated.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = MethodSet {
            mle: false,
            bayes: false,
            ebayes: [false; 3],
        };
        for item in s.split(',').map(str::trim) {
            match item.to_ascii_lowercase().as_str() {
                "all" => set = MethodSet::ALL,
                "mle" => set.mle = true,
                "bayes" => set.bayes = true,
                "ebayes" => set.ebayes = [true; 3],
                "ebayes1" => set.ebayes[0] = true,
                "ebayes2" => set.ebayes[1] = true,
                "ebayes3" => set.ebayes[2] = true,
                other => return Err(WgedError::Parse(format!("unknown method {:?}", other))),
            }
        }
        Ok(set)
    }
}

/// Evaluates the requested estimators for every target.
pub fn estimate_all<T: Scalar>(
    summary: &SampleSummary<T>,
    setup: &EstimationSetup<T>,
    methods: MethodSet,
) -> Result<EstimateGrid<T>> {
    let mut values = [[None; 9]; 4];
    let kernel = setup.known.hazard_kernel(setup.t_hazard)?;
    let put = |values: &mut [[Option<T>; 9]; 4], target: Target, est: Estimator, v: T| {
        values[target.index()][est.index()] = Some(v);
    };

    if methods.mle {
        let a = mle_alpha(summary)?;
        put(&mut values, Target::Alpha, Estimator::Mle, a);
        put(&mut values, Target::Hazard, Estimator::Mle, a * kernel);
        for target in [Target::Series, Target::Parallel] {
            let q = setup.query(target).expect("system target");
            let r = mle_derived(summary, &setup.known, &DerivedTarget::System(*q))?;
            put(&mut values, target, Estimator::Mle, r);
        }
    }

    if methods.bayes {
        for (linex, est) in [(false, Estimator::BayesSelf), (true, Estimator::BayesLinex)] {
            let loss = setup.loss_for(Target::Alpha, linex)?;
            let a = bayes_alpha(summary, &setup.prior, &loss).map_err(|e| e.context(est.label()))?;
            put(&mut values, Target::Alpha, est, a);
            let loss = setup.loss_for(Target::Hazard, linex)?;
            let h = bayes_alpha(summary, &setup.prior, &loss)? * kernel;
            put(&mut values, Target::Hazard, est, h);
            for target in [Target::Series, Target::Parallel] {
                let q = setup.query(target).expect("system target");
                let loss = setup.loss_for(target, linex)?;
                let r = bayes_reliability(summary, &setup.prior, &loss, q, &setup.known, &setup.numerics)
                    .map_err(|e| e.context(format!("{} {}", est.label(), target)))?;
                put(&mut values, target, est, r);
            }
        }
    }

    if methods.any_ebayes() {
        for linex in [false, true] {
            let mut record = |target: Target, triple: EbayesTriple<T>| {
                for p in PriorId::ALL {
                    let est = if linex {
                        Estimator::EbayesLinex(p)
                    } else {
                        Estimator::EbayesSelf(p)
                    };
                    if methods.includes(est) {
                        put(&mut values, target, est, triple.get(p));
                    }
                }
            };
            let loss = setup.loss_for(Target::Alpha, linex)?;
            record(Target::Alpha, ebayes_alpha(summary, &setup.hyper, &loss)?);
            let loss = setup.loss_for(Target::Hazard, linex)?;
            record(Target::Hazard, ebayes_alpha(summary, &setup.hyper, &loss)?.scale(kernel));
            for target in [Target::Series, Target::Parallel] {
                let q = setup.query(target).expect("system target");
                let loss = setup.loss_for(target, linex)?;
                let triple = ebayes_reliability(summary, &setup.hyper, &loss, q, &setup.known, &setup.numerics)
                    .map_err(|e| e.context(format!("E-Bayes {} {}", loss, target)))?;
                record(target, triple);
            }
        }
    }

    Ok(EstimateGrid { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimators_serialize_as_labels() {
        for e in Estimator::ALL {
            let text = serde_json::to_string(&e).unwrap();
            assert_eq!(text, format!("\"{}\"", e.label()));
            assert_eq!(serde_json::from_str::<Estimator>(&text).unwrap(), e);
        }
        assert!(serde_json::from_str::<Estimator>("\"EBS4\"").is_err());
    }
}

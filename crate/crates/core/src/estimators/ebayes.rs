//! E-Bayesian estimators: Bayes estimators averaged over a hyperprior on `(a, b)`.
//!
//! The hyperprior has `a ~ beta(u, v)` independent of `b` on `(0, c)`, with
//! three choices of `b`-density: uniform `1/c`, decreasing `2(c-b)/c²` and
//! increasing `2b/c²`. Since the uniform density is the average of the other
//! two, every E-Bayes triple satisfies `v₂ + v₃ = 2 v₁`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::censoring::SampleSummary;
use crate::distribution::{check_probability, KnownShape, SystemQuery};
use crate::error::{Result, WgedError};
use crate::numerics::{try_integrate, try_integrate_beta_weighted};
use crate::scalar::Scalar;

use super::classical::posterior_reliability;
use super::{EstimatorNumerics, GammaPrior, Loss, PosteriorSummary};

/// Which `b`-density the hyperprior uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PriorId {
    /// `1/c`
    Uniform,
    /// `2(c-b)/c²`
    Decreasing,
    /// `2b/c²`
    Increasing,
}

impl PriorId {
    pub const ALL: [PriorId; 3] = [PriorId::Uniform, PriorId::Decreasing, PriorId::Increasing];

    /// Zero-based position; the customary labels are `index() + 1`.
    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn number(&self) -> usize {
        self.index() + 1
    }

    pub fn from_number(n: usize) -> Option<Self> {
        Self::ALL.get(n.checked_sub(1)?).copied()
    }

    pub fn density<T: Scalar>(&self, b: T, c: T) -> T {
        let two = T::lit(2.0);
        match self {
            PriorId::Uniform => c.recip(),
            PriorId::Decreasing => two * (c - b) / (c * c),
            PriorId::Increasing => two * b / (c * c),
        }
    }
}

impl fmt::Display for PriorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi{}", self.number())
    }
}

/// Hyperprior parameters: `a ~ beta(u, v)`, `b` supported on `(0, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperPrior<T> {
    pub u: T,
    pub v: T,
    pub c: T,
}

impl<T: Scalar> HyperPrior<T> {
    pub fn new(u: T, v: T, c: T) -> Result<Self> {
        let ok = |x: T| x > T::zero() && x.is_finite();
        if !(ok(u) && ok(v) && ok(c)) {
            return Err(WgedError::domain(format!(
                "hyperprior needs u, v, c > 0, got ({}, {}, {})",
                u, v, c
            )));
        }
        Ok(Self { u, v, c })
    }

    /// `E[a] = u / (u + v)`.
    pub fn mean_a(&self) -> T {
        self.u / (self.u + self.v)
    }
}

/// One value per `b`-density, indexed by [`PriorId`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EbayesTriple<T> {
    pub values: [T; 3],
}

impl<T: Scalar> EbayesTriple<T> {
    pub fn get(&self, p: PriorId) -> T {
        self.values[p.index()]
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            values: self.values.map(|v| v * k),
        }
    }

    /// Largest minus smallest entry.
    pub fn max_gap(&self) -> T {
        let hi = self.values.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
        let lo = self.values.iter().fold(T::infinity(), |m, &v| m.min(v));
        hi - lo
    }

    /// `|v₂ + v₃ - 2 v₁| / |v₂ - v₃|`.
    pub fn spacing_residual(&self) -> T {
        let [v1, v2, v3] = self.values;
        ((v2 - v1) - (v1 - v3)).abs() / (v2 - v3).abs()
    }

    /// True when the entries are strictly increasing in the given order.
    pub fn ordered(&self, ascending: [PriorId; 3]) -> bool {
        self.get(ascending[0]) < self.get(ascending[1]) && self.get(ascending[1]) < self.get(ascending[2])
    }
}

fn require_positive_s<T: Scalar>(summary: &SampleSummary<T>) -> Result<()> {
    if summary.s_m > T::zero() {
        Ok(())
    } else {
        Err(WgedError::DegenerateSample("E-Bayes estimators need S_m > 0".into()))
    }
}

/// `(1+x) ln(1+x) - x` and `x - ln(1+x)`, both divided by `x²`.
fn spread_factors<T: Scalar>(x: T) -> (T, T) {
    if x < T::lit(0.1) {
        // Σ_{n>=2} (-1)^n x^{n-2} / (n(n-1)) and Σ_{n>=2} (-1)^n x^{n-2} / n
        let mut a = T::zero();
        let mut b = T::zero();
        let mut pow = T::one();
        for n in 2..60 {
            let nf = T::from_count(n);
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            a = a + sign * pow / (nf * (nf - T::one()));
            b = b + sign * pow / nf;
            pow = pow * x;
            if pow < T::epsilon() * T::lit(1e-3) {
                break;
            }
        }
        (a, b)
    } else {
        let l = x.ln_1p();
        let x2 = x * x;
        (((T::one() + x) * l - x) / x2, (x - l) / x2)
    }
}

/// E-Bayes estimates of `α` under squared-error loss (closed form).
pub fn ebayes_alpha_self<T: Scalar>(summary: &SampleSummary<T>, hyper: &HyperPrior<T>) -> Result<EbayesTriple<T>> {
    require_positive_s(summary)?;
    let s = summary.s_m;
    let ubar = summary.m_scalar() + hyper.mean_a();
    let x = hyper.c / s;
    let two = T::lit(2.0);
    let (fa, fb) = spread_factors(x);
    Ok(EbayesTriple {
        values: [ubar / s * (x.ln_1p() / x), two * ubar / s * fa, two * ubar / s * fb],
    })
}

/// `(ln(1+y) - y + y²/2) / y³`.
fn cubic_remainder<T: Scalar>(y: T) -> T {
    if y < T::lit(0.25) {
        let mut sum = T::zero();
        let mut pow = T::one();
        for n in 3..80 {
            let nf = T::from_count(n);
            let sign = if n % 2 == 1 { T::one() } else { -T::one() };
            sum = sum + sign * pow / nf;
            pow = pow * y;
            if pow < T::epsilon() * T::lit(1e-3) {
                break;
            }
        }
        sum
    } else {
        (y.ln_1p() - y + y * y * T::lit(0.5)) / (y * y * y)
    }
}

/// E-Bayes estimates of `α` under LINEX loss with shape `q` (closed form).
///
/// Each entry is `(m + E[a]) / q · E_b[ln(1 + q/(b + S_m))]`. The `b`-averages
/// are written in terms of `ln(1+·)` of small ratios so no difference of
/// large `x ln x` terms is ever formed.
pub fn ebayes_alpha_linex<T: Scalar>(
    summary: &SampleSummary<T>,
    hyper: &HyperPrior<T>,
    q: T,
) -> Result<EbayesTriple<T>> {
    require_positive_s(summary)?;
    if q == T::zero() || !q.is_finite() {
        return Err(WgedError::LossDomain(format!("LINEX shape must be nonzero, got {}", q)));
    }
    let s = summary.s_m;
    let c = hyper.c;
    if !(s + q > T::zero()) {
        return Err(WgedError::LossDomain(format!("LINEX needs S_m + q > 0, got {} + {}", s, q)));
    }
    let ubar = summary.m_scalar() + hyper.mean_a();

    // Uniform b: (1/c)[(S+c) ln(1+q/(S+c)) - S ln(1+q/S) + q ln(1+c/(S+q))]
    let e1 = ((s + c) * (q / (s + c)).ln_1p() - s * (q / s).ln_1p() + q * (c / (s + q)).ln_1p()) / c;
    // Increasing b: ln(1+q/(S+c)) - c [h(c/(S+q))/(S+q) - h(c/S)/S], h the cubic remainder.
    let e3 = (q / (s + c)).ln_1p() - c * (cubic_remainder(c / (s + q)) / (s + q) - cubic_remainder(c / s) / s);
    let e2 = T::lit(2.0) * e1 - e3;
    let k = ubar / q;
    Ok(EbayesTriple {
        values: [k * e1, k * e2, k * e3],
    })
}

pub fn ebayes_alpha<T: Scalar>(
    summary: &SampleSummary<T>,
    hyper: &HyperPrior<T>,
    loss: &Loss<T>,
) -> Result<EbayesTriple<T>> {
    match *loss {
        Loss::Squared => ebayes_alpha_self(summary, hyper),
        Loss::Linex { q } => ebayes_alpha_linex(summary, hyper, q),
    }
}

/// E-Bayes hazard estimates: the hazard kernel at `t` times the `α` triple.
pub fn ebayes_hazard<T: Scalar>(
    summary: &SampleSummary<T>,
    hyper: &HyperPrior<T>,
    t: T,
    known: &KnownShape<T>,
    loss: &Loss<T>,
) -> Result<EbayesTriple<T>> {
    Ok(ebayes_alpha(summary, hyper, loss)?.scale(known.hazard_kernel(t)?))
}

/// `E[g(a, b)]` under each of the three hyperpriors, by nested quadrature:
/// beta-weighted over `a`, then over `b ∈ (0, c)` against all three densities at once.
pub fn ebayes_expectation<T, G>(hyper: &HyperPrior<T>, numerics: &EstimatorNumerics<T>, mut g: G) -> Result<EbayesTriple<T>>
where
    T: Scalar,
    G: FnMut(T, T) -> Result<T>,
{
    let c = hyper.c;
    let values = try_integrate_beta_weighted(
        |a: T| {
            try_integrate(
                |b: T| {
                    let y = g(a, b).map_err(|e| e.context(format!("at (a, b) = ({}, {})", a, b)))?;
                    Ok(PriorId::ALL.map(|p| y * p.density(b, c)))
                },
                T::zero(),
                c,
                &numerics.middle,
            )
            .map(|r| r.value)
        },
        hyper.u,
        hyper.v,
        &numerics.outer,
    )?;
    Ok(EbayesTriple { values })
}

/// E-Bayes estimates of system reliability under the given loss.
pub fn ebayes_reliability<T: Scalar>(
    summary: &SampleSummary<T>,
    hyper: &HyperPrior<T>,
    loss: &Loss<T>,
    query: &SystemQuery<T>,
    known: &KnownShape<T>,
    numerics: &EstimatorNumerics<T>,
) -> Result<EbayesTriple<T>> {
    require_positive_s(summary)?;
    let w = known.transformed_time(query.t)?;
    let triple = ebayes_expectation(hyper, numerics, |a, b| {
        let post = PosteriorSummary::new(summary, &GammaPrior { a, b });
        posterior_reliability(&post, w, loss, query, numerics)
    })?;
    for v in triple.values {
        check_probability(v, "E-Bayes system reliability")?;
    }
    Ok(triple)
}

pub fn ebayes_reliability_self<T: Scalar>(
    summary: &SampleSummary<T>,
    hyper: &HyperPrior<T>,
    query: &SystemQuery<T>,
    known: &KnownShape<T>,
    numerics: &EstimatorNumerics<T>,
) -> Result<EbayesTriple<T>> {
    ebayes_reliability(summary, hyper, &Loss::Squared, query, known, numerics)
}

pub fn ebayes_reliability_linex<T: Scalar>(
    summary: &SampleSummary<T>,
    hyper: &HyperPrior<T>,
    query: &SystemQuery<T>,
    known: &KnownShape<T>,
    q: T,
    numerics: &EstimatorNumerics<T>,
) -> Result<EbayesTriple<T>> {
    ebayes_reliability(summary, hyper, &Loss::linex(q)?, query, known, numerics)
}

/// Relative spread below which a triple's ordering is not numerically meaningful.
pub const GAP_RESOLUTION: f64 = 1e-12;

/// Diagnostics for one squared-error triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleCheck {
    pub name: String,
    pub values: [f64; 3],
    /// Priors listed from smallest to largest expected value.
    pub expected_ascending: [PriorId; 3],
    pub ordering_holds: bool,
    /// False when the spread of the triple is below [`GAP_RESOLUTION`] relative
    /// to its magnitude, so rounding decides the ordering.
    pub resolved: bool,
    pub spacing_residual: f64,
    /// Max pairwise gap at `S_m`, `10 S_m` and `100 S_m`.
    pub gaps: [f64; 3],
}

impl TripleCheck {
    /// `gap(S)/gap(10S)` and `gap(10S)/gap(100S)`.
    pub fn contraction(&self) -> [f64; 2] {
        [self.gaps[0] / self.gaps[1], self.gaps[1] / self.gaps[2]]
    }
}

/// Ordering, spacing and contraction diagnostics for the squared-error triples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    /// `0 < c < S_m`; when false no checks are made.
    pub hypothesis_met: bool,
    pub c_over_s: f64,
    /// Triples for `α`, series and parallel reliability, and hazard, in that order.
    pub checks: Vec<TripleCheck>,
}

impl TheoremReport {
    pub fn check(&self, name: &str) -> Option<&TripleCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluates every squared-error triple and reports ordering, the midpoint
/// spacing identity, and how the spread shrinks as `S_m` grows tenfold.
#[allow(clippy::too_many_arguments)]
pub fn check_theorem_properties<T: Scalar>(
    summary: &SampleSummary<T>,
    hyper: &HyperPrior<T>,
    series: &SystemQuery<T>,
    parallel: &SystemQuery<T>,
    t_hazard: T,
    known: &KnownShape<T>,
    numerics: &EstimatorNumerics<T>,
) -> Result<TheoremReport> {
    require_positive_s(summary)?;
    let c_over_s = (hyper.c / summary.s_m).as_f64();
    if !(hyper.c < summary.s_m) {
        return Ok(TheoremReport {
            hypothesis_met: false,
            c_over_s,
            checks: Vec::new(),
        });
    }
    let kernel = known.hazard_kernel(t_hazard)?;
    let scales = [T::one(), T::lit(10.0), T::lit(100.0)];

    let falling = [PriorId::Increasing, PriorId::Uniform, PriorId::Decreasing];
    let rising = [PriorId::Decreasing, PriorId::Uniform, PriorId::Increasing];

    type Eval<'a, T> = Box<dyn Fn(&SampleSummary<T>) -> Result<EbayesTriple<T>> + 'a>;
    let evals: [(&str, [PriorId; 3], Eval<T>); 4] = [
        ("alpha", falling, Box::new(|s| ebayes_alpha_self(s, hyper))),
        (
            "series",
            rising,
            Box::new(|s| ebayes_reliability_self(s, hyper, series, known, numerics)),
        ),
        (
            "parallel",
            rising,
            Box::new(|s| ebayes_reliability_self(s, hyper, parallel, known, numerics)),
        ),
        ("hazard", falling, Box::new(|s| Ok(ebayes_alpha_self(s, hyper)?.scale(kernel)))),
    ];

    let mut checks = Vec::with_capacity(4);
    for (name, order, eval) in evals.iter() {
        let base = eval(summary)?;
        let mut gaps = [0.0; 3];
        for (g, &k) in gaps.iter_mut().zip(&scales) {
            *g = if k == T::one() {
                base.max_gap().as_f64()
            } else {
                eval(&summary.scaled(k))?.max_gap().as_f64()
            };
        }
        let values = base.values.map(|v| v.as_f64());
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        checks.push(TripleCheck {
            name: name.to_string(),
            values,
            expected_ascending: *order,
            ordering_holds: base.ordered(*order),
            resolved: gaps[0] > GAP_RESOLUTION * scale,
            spacing_residual: base.spacing_residual().as_f64(),
            gaps,
        });
    }
    Ok(TheoremReport {
        hypothesis_met: true,
        c_over_s,
        checks,
    })
}

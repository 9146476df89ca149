//! Maximum-likelihood and Bayes estimators.

use crate::censoring::SampleSummary;
use crate::distribution::{
    check_probability, parallel_reliability_kernel, series_reliability_kernel, KnownShape, SystemQuery, Topology,
    MAX_COMPONENTS,
};
use crate::error::{Result, WgedError};
use crate::numerics::special::{binomial, log_factorial};
use crate::numerics::{sum_alternating_series, try_integrate_semi_infinite_scaled, QuadValue, QuadratureSpec};
use crate::scalar::{CompensatedSum, Scalar};

use super::{EstimatorNumerics, GammaPrior, Loss, PosteriorSummary};

/// `m / S_m`.
pub fn mle_alpha<T: Scalar>(summary: &SampleSummary<T>) -> Result<T> {
    if !(summary.s_m > T::zero()) {
        return Err(WgedError::DegenerateSample(
            "S_m = 0, the likelihood has no maximum".into(),
        ));
    }
    Ok(summary.m_scalar() / summary.s_m)
}

/// A quantity obtained from `α` by plugging into the distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivedTarget<T> {
    System(SystemQuery<T>),
    Hazard(T),
}

/// Plug-in MLE of system reliability or hazard rate.
pub fn mle_derived<T: Scalar>(summary: &SampleSummary<T>, known: &KnownShape<T>, target: &DerivedTarget<T>) -> Result<T> {
    let alpha = mle_alpha(summary)?;
    match target {
        DerivedTarget::System(q) => {
            let x = alpha * known.transformed_time(q.t)?;
            let r = match q.topology {
                Topology::Series => series_reliability_kernel(x, q.k),
                Topology::Parallel => parallel_reliability_kernel(x, q.k),
            };
            check_probability(r, "MLE system reliability")
        }
        DerivedTarget::Hazard(t) => Ok(alpha * known.hazard_kernel(*t)?),
    }
}

/// Posterior mean under squared error, `-(1/q) ln E[e^{-qα}]` under LINEX.
pub fn bayes_alpha<T: Scalar>(summary: &SampleSummary<T>, prior: &GammaPrior<T>, loss: &Loss<T>) -> Result<T> {
    let post = PosteriorSummary::new(summary, prior);
    match *loss {
        Loss::Squared => Ok(post.mean()),
        Loss::Linex { q } => {
            if !(post.rate + q > T::zero()) {
                return Err(WgedError::LossDomain(format!(
                    "LINEX needs b + S_m + q > 0, got {} + {}",
                    post.rate, q
                )));
            }
            // -(shape/q) ln(rate/(rate+q)) = (shape/q) ln(1 + q/rate)
            Ok(post.shape / q * (q / post.rate).ln_1p())
        }
    }
}

/// Bayes estimate of the hazard rate at `t`: the hazard kernel times the Bayes estimate of `α`.
pub fn bayes_hazard<T: Scalar>(
    summary: &SampleSummary<T>,
    prior: &GammaPrior<T>,
    loss: &Loss<T>,
    t: T,
    known: &KnownShape<T>,
) -> Result<T> {
    Ok(known.hazard_kernel(t)? * bayes_alpha(summary, prior, loss)?)
}

/// Bayes estimate of series or parallel system reliability.
pub fn bayes_reliability<T: Scalar>(
    summary: &SampleSummary<T>,
    prior: &GammaPrior<T>,
    loss: &Loss<T>,
    query: &SystemQuery<T>,
    known: &KnownShape<T>,
    numerics: &EstimatorNumerics<T>,
) -> Result<T> {
    let post = PosteriorSummary::new(summary, prior);
    let w = known.transformed_time(query.t)?;
    posterior_reliability(&post, w, loss, query, numerics)
}

/// `E[e^{-jα w}]` under the gamma posterior: `(rate / (rate + j w))^shape`.
fn laplace<T: Scalar>(post: &PosteriorSummary<T>, jw: T) -> T {
    (-post.shape * (jw / post.rate).ln_1p()).exp()
}

/// Alternating binomial sum `Σ_{i=1}^k (-1)^{i-1} C(k,i) term(i)` with compensated addition.
fn alternating_binomial<T: Scalar>(k: usize, mut term: impl FnMut(usize) -> T) -> T {
    let ln_k_fact = log_factorial::<T>(k);
    let mut acc = CompensatedSum::new();
    for i in 1..=k {
        let c = if k <= 60 {
            binomial::<T>(k, i)
        } else {
            (ln_k_fact - log_factorial::<T>(i) - log_factorial::<T>(k - i)).exp()
        };
        let t = c * term(i);
        if i % 2 == 1 {
            acc.add(t);
        } else {
            acc.add(-t);
        }
    }
    acc.value()
}

/// Bayes reliability from a posterior and `w = w(t)`; shared with the E-Bayes layer.
pub(crate) fn posterior_reliability<T: Scalar>(
    post: &PosteriorSummary<T>,
    w: T,
    loss: &Loss<T>,
    query: &SystemQuery<T>,
    numerics: &EstimatorNumerics<T>,
) -> Result<T> {
    debug_assert!(query.k <= MAX_COMPONENTS);
    let k = query.k;
    let kf = T::from_count(k);
    let r = match (*loss, query.topology) {
        (Loss::Squared, Topology::Series) => laplace(post, kf * w),
        (Loss::Squared, Topology::Parallel) => alternating_binomial(k, |i| laplace(post, T::from_count(i) * w)),
        (Loss::Linex { q }, Topology::Series) => {
            // E[exp(-q R_s)] - 1 = Σ_{j>=1} (-q)^j/j! E[e^{-jkαw}]
            let ln_q = q.abs().ln();
            let tail = sum_alternating_series(
                |i| {
                    let j = i + 1;
                    let mag = (T::from_count(j) * ln_q - log_factorial::<T>(j)
                        - post.shape * (T::from_count(j) * kf * w / post.rate).ln_1p())
                    .exp();
                    if q > T::zero() && j % 2 == 1 {
                        -mag
                    } else {
                        mag
                    }
                },
                &numerics.series,
            )?
            .sum;
            linex_from_tail(tail, q)?
        }
        (Loss::Linex { q }, Topology::Parallel) => {
            let log_norm = post.log_norm()?;
            let tail: T = try_integrate_semi_infinite_scaled(
                |alpha: T| {
                    if alpha == T::zero() {
                        return Ok(T::zero());
                    }
                    let dens = post.log_density(alpha, log_norm).exp();
                    let rp = parallel_reliability_kernel(alpha * w, k);
                    Ok(dens * (-q * rp).exp_m1())
                },
                post.mean(),
                &numerics.inner,
            )?;
            linex_from_tail(tail, q)?
        }
    };
    check_probability(r, "Bayes system reliability")
}

/// `-(1/q) ln(1 + tail)` where `tail = E[e^{-qR}] - 1`.
fn linex_from_tail<T: Scalar>(tail: T, q: T) -> Result<T> {
    if !(tail > -T::one()) {
        return Err(WgedError::LossDomain(format!(
            "posterior expectation of exp(-qR) is not positive (tail {})",
            tail
        )));
    }
    Ok(-tail.ln_1p() / q)
}

/// `E[g(α)]` under the gamma posterior, by semi-infinite quadrature.
///
/// This is the brute-force route the closed forms are checked against.
pub fn posterior_expectation<T, V, G>(
    summary: &SampleSummary<T>,
    prior: &GammaPrior<T>,
    mut g: G,
    spec: &QuadratureSpec<T>,
) -> Result<V>
where
    T: Scalar,
    V: QuadValue<T>,
    G: FnMut(T) -> V,
{
    let post = PosteriorSummary::new(summary, prior);
    let log_norm = post.log_norm()?;
    try_integrate_semi_infinite_scaled(
        |alpha: T| {
            let mut out = V::zero();
            if alpha > T::zero() {
                out.add_scaled(post.log_density(alpha, log_norm).exp(), &g(alpha));
            }
            Ok(out)
        },
        post.mean(),
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::censoring::{CensoredSample, CensoringScheme};
    use crate::electric;

    fn real(scheme: &str) -> SampleSummary<f64> {
        let s = CensoringScheme::parse(scheme, 19).unwrap();
        CensoredSample::from_complete(&electric::FAILURE_TIMES, &s)
            .unwrap()
            .summary(electric::LAMBDA, electric::THETA)
            .unwrap()
    }

    fn prior() -> GammaPrior<f64> {
        GammaPrior::new(electric::A, electric::B).unwrap()
    }

    #[test]
    fn mle_basic() {
        let s = SampleSummary::new(10, 5.0).unwrap();
        assert_eq!(mle_alpha(&s).unwrap(), 2.0);
        let zero = SampleSummary::new(3, 0.0).unwrap();
        assert!(matches!(mle_alpha(&zero), Err(WgedError::DegenerateSample(_))));
    }

    #[test]
    fn real_data_mle_and_bayes_alpha() {
        assert!((mle_alpha(&real("0*19")).unwrap() - 0.9562884).abs() < 5e-8);
        assert!((mle_alpha(&real("1*4,0*11")).unwrap() - 0.7551532).abs() < 5e-8);
        assert!((mle_alpha(&real("4,4,1,0*7")).unwrap() - 0.5046544).abs() < 5e-8);
        let s = real("0*19");
        assert!((bayes_alpha(&s, &prior(), &Loss::Squared).unwrap() - 0.9419926).abs() < 5e-8);
        assert!((bayes_alpha(&s, &prior(), &Loss::linex(1.0).unwrap()).unwrap() - 0.9197259).abs() < 5e-8);
    }

    #[test]
    fn real_data_hazard() {
        let s = real("0*19");
        let known = KnownShape::new(electric::LAMBDA, electric::THETA).unwrap();
        let h = mle_derived(&s, &known, &DerivedTarget::Hazard(100.0)).unwrap();
        assert!((h - 2.677426).abs() < 5e-7);
        let h = bayes_hazard(&s, &prior(), &Loss::Squared, 100.0, &known).unwrap();
        assert!((h - 2.637401).abs() < 5e-7);
    }

    #[test]
    fn linex_domain() {
        let s = SampleSummary::new(3, 1.0).unwrap();
        let p = GammaPrior::new(0.5, 0.5).unwrap();
        assert!(matches!(
            bayes_alpha(&s, &p, &Loss::Linex { q: -1.5 }),
            Err(WgedError::LossDomain(_))
        ));
        assert!(Loss::<f64>::linex(0.0).is_err());
    }

    #[test]
    fn small_q_limit() {
        let s = real("0*19");
        let self_ = bayes_alpha(&s, &prior(), &Loss::Squared).unwrap();
        let lin = bayes_alpha(&s, &prior(), &Loss::linex(1e-9).unwrap()).unwrap();
        assert!((self_ - lin).abs() < 1e-8);
    }

    #[test]
    fn series_linex_matches_direct_integral() {
        let s = real("0*19");
        let known = KnownShape::new(electric::LAMBDA, electric::THETA).unwrap();
        let num = EstimatorNumerics::default();
        let q = SystemQuery::series(8.0, 5).unwrap();
        let loss = Loss::linex(2.0).unwrap();
        let via_series = bayes_reliability(&s, &prior(), &loss, &q, &known, &num).unwrap();
        let w = known.transformed_time(8.0).unwrap();
        let spec = QuadratureSpec::new(1e-14, 1e-12, 200, 64).unwrap();
        let e: f64 = posterior_expectation(&s, &prior(), |a| (-2.0 * (-5.0 * a * w).exp()).exp(), &spec).unwrap();
        assert!((via_series + e.ln() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn parallel_equals_series_for_one_component() {
        let s = real("1*4,0*11");
        let known = KnownShape::new(electric::LAMBDA, electric::THETA).unwrap();
        let num = EstimatorNumerics::default();
        for loss in [Loss::Squared, Loss::linex(2.0).unwrap(), Loss::linex(-0.7).unwrap()] {
            let a = bayes_reliability(&s, &prior(), &loss, &SystemQuery::series(8.0, 1).unwrap(), &known, &num).unwrap();
            let b = bayes_reliability(&s, &prior(), &loss, &SystemQuery::parallel(8.0, 1).unwrap(), &known, &num)
                .unwrap();
            assert!((a - b).abs() < 1e-10, "{loss}: {a} vs {b}");
        }
    }

    #[test]
    fn linex_below_self_for_positive_q() {
        let s = real("4,4,1,0*7");
        let known = KnownShape::new(electric::LAMBDA, electric::THETA).unwrap();
        let num = EstimatorNumerics::default();
        // At t = 8 the parallel system is too reliable for the two losses to separate.
        for q in [SystemQuery::series(40.0, 5).unwrap(), SystemQuery::parallel(40.0, 5).unwrap()] {
            let a = bayes_reliability(&s, &prior(), &Loss::Squared, &q, &known, &num).unwrap();
            let b = bayes_reliability(&s, &prior(), &Loss::linex(2.0).unwrap(), &q, &known, &num).unwrap();
            assert!(b < a);
        }
    }
}

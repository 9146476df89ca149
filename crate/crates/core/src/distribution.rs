//! The Weibull generalized exponential distribution.
//!
//! Density `f(x) = αλθ e^{λx} (e^{λx} - 1)^{θ-1} exp(-α (e^{λx} - 1)^θ)` for
//! `x > 0`. With `w(t) = (e^{λt} - 1)^θ` the reliability is `exp(-α w(t))` and
//! the hazard is `α w'(t)`; `w` and `w'` depend only on the known pair `(λ, θ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WgedError};
use crate::numerics::special::log_factorial;
use crate::scalar::{CompensatedSum, Scalar};

/// Largest component count accepted for a system query.
pub const MAX_COMPONENTS: usize = 10_000;

/// The known shape pair `(λ, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownShape<T> {
    pub lambda: T,
    pub theta: T,
}

impl<T: Scalar> KnownShape<T> {
    pub fn new(lambda: T, theta: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) || !(theta > T::zero() && theta.is_finite()) {
            return Err(WgedError::domain(format!(
                "lambda and theta must be finite and positive, got ({}, {})",
                lambda, theta
            )));
        }
        Ok(Self { lambda, theta })
    }

    /// `w(t) = (e^{λt} - 1)^θ`, zero at the origin and strictly increasing.
    pub fn transformed_time(&self, t: T) -> Result<T> {
        if t < T::zero() || t.is_nan() {
            return Err(WgedError::domain(format!("time must be nonnegative, got {}", t)));
        }
        if t == T::zero() {
            return Ok(T::zero());
        }
        Ok((self.theta * (self.lambda * t).exp_m1().ln()).exp())
    }

    /// `λθ e^{λt} (e^{λt} - 1)^{θ-1}`, i.e. `w'(t)`; the factor that turns an
    /// estimate of `α` into an estimate of the hazard rate.
    pub fn hazard_kernel(&self, t: T) -> Result<T> {
        if t < T::zero() || t.is_nan() {
            return Err(WgedError::domain(format!("time must be nonnegative, got {}", t)));
        }
        if t == T::zero() {
            return if self.theta > T::one() {
                Ok(T::zero())
            } else if self.theta == T::one() {
                Ok(self.lambda)
            } else {
                Err(WgedError::domain("hazard diverges at t = 0 when theta < 1"))
            };
        }
        let lt = self.lambda * t;
        Ok((self.lambda.ln() + self.theta.ln() + lt + (self.theta - T::one()) * lt.exp_m1().ln()).exp())
    }
}

/// The distribution triple `(α, λ, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WgedParams<T> {
    pub alpha: T,
    pub lambda: T,
    pub theta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Series,
    Parallel,
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Topology::Series => f.write_str("series"),
            Topology::Parallel => f.write_str("parallel"),
        }
    }
}

/// Reliability of a system of `k` independent identical components at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemQuery<T> {
    pub t: T,
    pub k: usize,
    pub topology: Topology,
}

impl<T: Scalar> SystemQuery<T> {
    pub fn new(t: T, k: usize, topology: Topology) -> Result<Self> {
        if !(t > T::zero() && t.is_finite()) {
            return Err(WgedError::domain(format!("system time must be positive, got {}", t)));
        }
        if k == 0 || k > MAX_COMPONENTS {
            return Err(WgedError::domain(format!(
                "component count must lie in 1..={}, got {}",
                MAX_COMPONENTS, k
            )));
        }
        Ok(Self { t, k, topology })
    }

    pub fn series(t: T, k: usize) -> Result<Self> {
        Self::new(t, k, Topology::Series)
    }

    pub fn parallel(t: T, k: usize) -> Result<Self> {
        Self::new(t, k, Topology::Parallel)
    }
}

/// `exp(-k x)` where `x = α w(t)`.
#[inline]
pub fn series_reliability_kernel<T: Scalar>(alpha_w: T, k: usize) -> T {
    (-T::from_count(k) * alpha_w).exp()
}

/// `Σ_{i=1}^k (-1)^{i-1} C(k,i) exp(-i x)` with compensated summation.
pub fn parallel_reliability_kernel<T: Scalar>(alpha_w: T, k: usize) -> T {
    let mut acc = CompensatedSum::new();
    if k <= 60 {
        let e = (-alpha_w).exp();
        let mut pow = T::one();
        let mut c = T::one();
        for i in 1..=k {
            pow = pow * e;
            c = c * T::from_count(k + 1 - i) / T::from_count(i);
            let term = c.round() * pow;
            if i % 2 == 1 {
                acc.add(term);
            } else {
                acc.add(-term);
            }
        }
        return acc.value();
    }
    let ln_k_fact = log_factorial::<T>(k);
    for i in 1..=k {
        let ln_c = ln_k_fact - log_factorial::<T>(i) - log_factorial::<T>(k - i);
        let term = (ln_c - T::from_count(i) * alpha_w).exp();
        if i % 2 == 1 {
            acc.add(term);
        } else {
            acc.add(-term);
        }
    }
    acc.value()
}

/// Complementary-product form `1 - (1 - e^{-x})^k` of the parallel reliability.
pub fn parallel_reliability_product<T: Scalar>(alpha_w: T, k: usize) -> T {
    let fail = -(-alpha_w).exp_m1();
    -(T::from_count(k) * fail.ln()).exp_m1()
}

impl<T: Scalar> WgedParams<T> {
    pub fn new(alpha: T, lambda: T, theta: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha.is_finite()) {
            return Err(WgedError::domain(format!("alpha must be finite and positive, got {}", alpha)));
        }
        KnownShape::new(lambda, theta)?;
        Ok(Self { alpha, lambda, theta })
    }

    pub fn known(&self) -> KnownShape<T> {
        KnownShape {
            lambda: self.lambda,
            theta: self.theta,
        }
    }

    pub fn with_alpha(&self, alpha: T) -> Result<Self> {
        Self::new(alpha, self.lambda, self.theta)
    }

    pub fn pdf(&self, x: T) -> Result<T> {
        let kernel = self.known().hazard_kernel(x)?;
        Ok(self.alpha * kernel * self.reliability(x)?)
    }

    pub fn cdf(&self, x: T) -> Result<T> {
        let w = self.known().transformed_time(x)?;
        Ok(-(-self.alpha * w).exp_m1())
    }

    pub fn reliability(&self, t: T) -> Result<T> {
        let w = self.known().transformed_time(t)?;
        Ok((-self.alpha * w).exp())
    }

    /// Series: `exp(-kαw(t))`. Parallel: the alternating binomial sum.
    pub fn reliability_system(&self, query: &SystemQuery<T>) -> Result<T> {
        let alpha_w = self.alpha * self.known().transformed_time(query.t)?;
        let r = match query.topology {
            Topology::Series => series_reliability_kernel(alpha_w, query.k),
            Topology::Parallel => parallel_reliability_kernel(alpha_w, query.k),
        };
        check_probability(r, "system reliability")
    }

    pub fn hazard(&self, t: T) -> Result<T> {
        Ok(self.alpha * self.known().hazard_kernel(t)?)
    }

    /// Inverse of the distribution function on `[0, 1)`.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p >= T::zero() && p < T::one()) {
            return Err(WgedError::domain(format!("quantile needs p in [0, 1), got {}", p)));
        }
        let w = -(-p).ln_1p() / self.alpha;
        Ok((w.powf(self.theta.recip())).ln_1p() / self.lambda)
    }
}

/// Accepts values within `1e-9` of `[0, 1]`; anything further out is an integrity failure.
pub(crate) fn check_probability<T: Scalar>(r: T, what: &str) -> Result<T> {
    let slack = T::lit(1e-9);
    if !r.is_finite() || r < -slack || r > T::one() + slack {
        return Err(WgedError::NumericalIntegrity(format!(
            "{} = {} lies outside [0, 1]",
            what, r
        )));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn simulation_truth() -> WgedParams<f64> {
        WgedParams::new(0.957_061_5, 3.0, 2.5).unwrap()
    }

    #[test]
    fn unit_exponential_case() {
        let p = WgedParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.pdf(0.0).unwrap(), 1.0);
        assert_eq!(p.hazard(0.0).unwrap(), 1.0);
        assert_eq!(p.cdf(0.0).unwrap(), 0.0);
        assert_eq!(p.reliability(0.0).unwrap(), 1.0);
    }

    #[test]
    fn origin_behaviour_depends_on_theta() {
        let p = WgedParams::new(1.0, 1.0, 0.5).unwrap();
        assert!(p.pdf(0.0).is_err());
        assert!(p.hazard(0.0).is_err());
        assert_eq!(p.cdf(0.0).unwrap(), 0.0);
        let p = WgedParams::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(p.pdf(0.0).unwrap(), 0.0);
        assert!(p.cdf(-1.0).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(WgedParams::new(0.0, 1.0, 1.0).is_err());
        assert!(WgedParams::new(1.0, -1.0, 1.0).is_err());
        assert!(WgedParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(SystemQuery::series(0.0, 5).is_err());
        assert!(SystemQuery::series(1.0, 0).is_err());
        assert!(SystemQuery::parallel(1.0, MAX_COMPONENTS + 1).is_err());
    }

    #[test]
    fn simulation_true_values() {
        let p = simulation_truth();
        let rs = p.reliability_system(&SystemQuery::series(0.1, 5).unwrap()).unwrap();
        assert!((rs - 0.707_193_4).abs() < 1e-6, "{rs}");
        let rp = p.reliability_system(&SystemQuery::parallel(0.25, 5).unwrap()).unwrap();
        assert!((rp - 0.810_606_6).abs() < 1e-6, "{rp}");
        let h = p.hazard(0.1).unwrap();
        assert!((h - 2.005_066).abs() < 1e-6, "{h}");
    }

    #[test]
    fn simulation_component_values() {
        let p = simulation_truth();
        // Fifth root of the series-system value; cdf oracle from mpmath.
        let r = p.reliability(0.1).unwrap();
        assert!((r - 0.707_193_4f64.powf(0.2)).abs() < 1e-7);
        assert!((p.cdf(0.1).unwrap() - 0.066_944_140_989_590_15).abs() < 1e-14);
        let f = p.pdf(0.1).unwrap();
        assert!((f - 2.005_066 * r).abs() < 1e-6);
    }

    #[test]
    fn quantile_matches_bisection_oracle() {
        // Root of F(x) = 1/2 by 40-digit bisection.
        let q = simulation_truth().quantile(0.5).unwrap();
        assert!((q - 0.210_234_140_120_279_34).abs() < 1e-12, "{q}");
        assert_eq!(simulation_truth().quantile(0.0).unwrap(), 0.0);
        assert!(simulation_truth().quantile(1.0).is_err());
        assert!(simulation_truth().quantile(-0.1).is_err());
    }

    #[test]
    fn quantile_roundtrip() {
        let p = simulation_truth();
        for &pr in &[0.1, 0.5, 0.9] {
            let x = p.quantile(pr).unwrap();
            assert!((p.cdf(x).unwrap() - pr).abs() < 1e-10);
        }
    }

    #[test]
    fn single_component_systems() {
        let p = simulation_truth();
        let r = p.reliability(0.2).unwrap();
        for q in [SystemQuery::series(0.2, 1).unwrap(), SystemQuery::parallel(0.2, 1).unwrap()] {
            assert!((p.reliability_system(&q).unwrap() - r).abs() < 1e-15);
        }
    }

    #[test]
    fn cdf_limit() {
        let p = simulation_truth();
        assert!((p.cdf(50.0 / p.lambda).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hazard_is_alpha_times_w_prime() {
        let p = WgedParams::<f64>::new(0.7, 0.4, 1.7).unwrap();
        let known = p.known();
        for &t in &[0.3, 1.0, 2.5] {
            let h = 1e-6 * t;
            let dw = (known.transformed_time(t + h).unwrap() - known.transformed_time(t - h).unwrap()) / (2.0 * h);
            let hz = p.hazard(t).unwrap();
            assert!(((p.alpha * dw - hz) / hz).abs() < 1e-5);
        }
    }

    #[test]
    fn single_precision_params() {
        let p = WgedParams::<f32>::new(0.957_061_5, 3.0, 2.5).unwrap();
        let rs = p.reliability_system(&SystemQuery::series(0.1, 5).unwrap()).unwrap();
        assert!((rs - 0.707_193_4).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn pdf_equals_hazard_times_reliability(
            alpha in 0.05f64..5.0, lambda in 0.01f64..4.0, theta in 0.2f64..4.0, t in 0.01f64..3.0
        ) {
            let p = WgedParams::new(alpha, lambda, theta).unwrap();
            let f = p.pdf(t).unwrap();
            let hr = p.hazard(t).unwrap() * p.reliability(t).unwrap();
            prop_assert!(f >= 0.0);
            prop_assert!((f - hr).abs() <= 1e-12 * f.abs().max(1e-300));
        }

        #[test]
        fn cdf_monotone_and_complementary(
            alpha in 0.05f64..5.0, lambda in 0.01f64..4.0, theta in 0.2f64..4.0,
            t1 in 0.0f64..3.0, dt in 0.0f64..1.0
        ) {
            let p = WgedParams::new(alpha, lambda, theta).unwrap();
            let c1 = p.cdf(t1).unwrap();
            let c2 = p.cdf(t1 + dt).unwrap();
            prop_assert!((0.0..=1.0).contains(&c1));
            prop_assert!(c2 >= c1);
            prop_assert!((1.0 - c1 - p.reliability(t1).unwrap()).abs() <= 2e-16);
        }

        #[test]
        fn system_forms_agree(
            alpha in 0.05f64..3.0, t in 0.02f64..0.6, k in 1usize..12
        ) {
            let p = WgedParams::new(alpha, 3.0, 2.5).unwrap();
            let r = p.reliability(t).unwrap();
            let rs = p.reliability_system(&SystemQuery::series(t, k).unwrap()).unwrap();
            prop_assert!((rs - r.powi(k as i32)).abs() <= 1e-12 * r.powi(k as i32).max(1e-300) + 1e-300);
            let rp = p.reliability_system(&SystemQuery::parallel(t, k).unwrap()).unwrap();
            let oracle = parallel_reliability_product(alpha * p.known().transformed_time(t).unwrap(), k);
            prop_assert!((rp - oracle).abs() <= 1e-10);
            prop_assert!((rp - (1.0 - (1.0 - r).powi(k as i32))).abs() <= 1e-10);
            prop_assert!(rp + 1e-12 >= rs);
        }

        #[test]
        fn quantile_inverts_cdf(
            alpha in 0.05f64..5.0, lambda in 0.01f64..4.0, theta in 0.2f64..4.0, pr in 0.001f64..0.999
        ) {
            let p = WgedParams::new(alpha, lambda, theta).unwrap();
            let x = p.quantile(pr).unwrap();
            prop_assert!((p.cdf(x).unwrap() - pr).abs() <= 1e-10);
        }
    }
}

//! Maximum-likelihood, Bayes, and E-Bayes estimation for the Weibull
//! generalized exponential (WGED) lifetime distribution from progressive
//! type-II censored samples.
//!
//! The WGED with known `λ, θ` has reliability `R(t) = exp(-α w(t))`, where
//! `w(t) = (e^{λt} - 1)^θ`, so every estimator of `α`, of series/parallel
//! system reliability, and of the hazard rate depends on the data only through
//! `m` and `S_m = Σ (R_i + 1) w(x_i)`.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the simulation
//! harness and the CLI use.
//!
//! ```
//! use wged::{CensoringScheme, CensoredSample, electric};
//!
//! let scheme = CensoringScheme::parse("0*19", 19).unwrap();
//! let sample = CensoredSample::from_complete(&electric::FAILURE_TIMES, &scheme).unwrap();
//! let summary = sample.summary(electric::LAMBDA, electric::THETA).unwrap();
//! let alpha = wged::estimators::mle_alpha(&summary).unwrap();
//! assert!((alpha - 0.9562884).abs() < 5e-8);
//! ```

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod censoring;
pub mod distribution;
pub mod electric;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod numerics;
pub mod report;
pub mod scalar;

pub use error::{Result, WgedError};
pub use scalar::Scalar;

pub use censoring::CensoringScheme;

/// Distribution parameters `(α, λ, θ)` in double precision.
pub type WgedParams = distribution::WgedParams<f64>;
/// Distribution parameters in single precision.
pub type WgedParamsF32 = distribution::WgedParams<f32>;
/// Known shape pair `(λ, θ)`.
pub type KnownShape = distribution::KnownShape<f64>;
pub type SystemQuery = distribution::SystemQuery<f64>;
pub type CensoredSample = censoring::CensoredSample<f64>;
pub type SampleSummary = censoring::SampleSummary<f64>;
pub type GammaPrior = estimators::GammaPrior<f64>;
pub type Loss = estimators::Loss<f64>;
pub type HyperPrior = estimators::HyperPrior<f64>;
pub type EbayesTriple = estimators::EbayesTriple<f64>;
pub type QuadratureSpec = numerics::QuadratureSpec<f64>;
pub type SeriesSpec = numerics::SeriesSpec<f64>;

//! Numerical kernel: log-domain special functions, adaptive quadrature, and
//! truncated series. Every integral and infinite sum elsewhere in the crate
//! goes through here.

pub mod quadrature;
pub mod series;
pub mod special;

pub use quadrature::{
    gauss_legendre_f64, integrate_beta_weighted, integrate_finite, integrate_semi_infinite,
    try_integrate, try_integrate_beta_weighted, try_integrate_semi_infinite_scaled, Integral,
    QuadValue, QuadratureSpec,
};
pub use series::{sum_alternating_series, SeriesSpec, SeriesSum};
pub use special::{binomial, ln_ratio, log_beta, log_factorial, log_gamma};

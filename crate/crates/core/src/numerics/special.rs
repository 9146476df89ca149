//! Log-domain special functions.

use crate::error::{Result, WgedError};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Coefficients B_{2k} / (2k (2k-1)) of the Stirling series.
const STIRLING_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// Natural logarithm of the gamma function for `z > 0`.
///
/// Uses the Lanczos approximation on `[0.5, 10)`, the Stirling series above
/// that, and the recurrence `ln Γ(z) = ln Γ(z+1) - ln z` below `0.5`.
pub fn log_gamma<T: Scalar>(z: T) -> Result<T> {
    if !z.is_finite() || z <= T::zero() {
        return Err(WgedError::domain(format!(
            "log_gamma requires a finite positive argument, got {}",
            z
        )));
    }
    Ok(log_gamma_unchecked(z))
}

pub(crate) fn log_gamma_unchecked<T: Scalar>(z: T) -> T {
    if z == T::one() || z == T::lit(2.0) {
        return T::zero();
    }
    let half = T::lit(0.5);
    if z < half {
        return log_gamma_unchecked(z + T::one()) - z.ln();
    }
    let half_ln_two_pi = T::lit(0.5) * (T::TAU()).ln();
    if z >= T::lit(10.0) {
        let inv = z.recip();
        let inv2 = inv * inv;
        let mut corr = T::zero();
        let mut pow = inv;
        for c in STIRLING_COEFFS {
            corr = corr + T::lit(c) * pow;
            pow = pow * inv2;
        }
        return (z - half) * z.ln() - z + half_ln_two_pi + corr;
    }
    let z = z - T::one();
    let mut x = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x = x + T::lit(c) / (z + T::from_count(i));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    half_ln_two_pi + (z + half) * t.ln() - t + x.ln()
}

/// `ln B(u, v) = ln Γ(u) + ln Γ(v) - ln Γ(u + v)`.
pub fn log_beta<T: Scalar>(u: T, v: T) -> Result<T> {
    if !(u.is_finite() && v.is_finite()) || u <= T::zero() || v <= T::zero() {
        return Err(WgedError::domain(format!(
            "log_beta requires positive arguments, got ({}, {})",
            u, v
        )));
    }
    // Sorted so that log_beta(u, v) and log_beta(v, u) round identically.
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    Ok(log_gamma_unchecked(lo) + log_gamma_unchecked(hi) - log_gamma_unchecked(lo + hi))
}

/// `ln(num / den)` for positive operands, through `ln_1p` of the relative
/// difference so that ratios near one keep full precision.
#[inline]
pub fn ln_ratio<T: Scalar>(num: T, den: T) -> T {
    ((num - den) / den).ln_1p()
}

/// `ln(k!)`.
#[inline]
pub fn log_factorial<T: Scalar>(k: usize) -> T {
    log_gamma_unchecked(T::from_count(k) + T::one())
}

/// Binomial coefficient `C(n, k)` as a scalar.
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    T::lit(acc.round())
}

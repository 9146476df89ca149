//! Guarded summation of rapidly decaying (typically alternating) series.

use crate::error::{Result, WgedError};
use crate::scalar::{CompensatedSum, Scalar};

/// Truncation policy for [`sum_alternating_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec<T> {
    /// A term is negligible once `|term| <= term_tol * |partial sum|`.
    pub term_tol: T,
    pub max_terms: usize,
}

impl<T: Scalar> SeriesSpec<T> {
    pub fn new(term_tol: T, max_terms: usize) -> Result<Self> {
        if !(term_tol > T::zero()) || max_terms < 1 {
            return Err(WgedError::domain(format!(
                "series spec needs term_tol > 0 and max_terms >= 1, got ({}, {})",
                term_tol, max_terms
            )));
        }
        Ok(Self {
            term_tol,
            max_terms,
        })
    }
}

impl<T: Scalar> Default for SeriesSpec<T> {
    fn default() -> Self {
        Self {
            term_tol: T::lit(1e-13),
            max_terms: 500,
        }
    }
}

/// Result of a truncated series: the sum and the number of terms used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum<T> {
    pub sum: T,
    pub terms: usize,
}

/// Sums `term(0) + term(1) + ...` with compensated addition, stopping after
/// two consecutive negligible terms.
///
/// Non-positive partial sums are not an error here; callers that take a
/// logarithm of the result check its sign themselves.
pub fn sum_alternating_series<T, F>(mut term: F, spec: &SeriesSpec<T>) -> Result<SeriesSum<T>>
where
    T: Scalar,
    F: FnMut(usize) -> T,
{
    let mut acc = CompensatedSum::new();
    let mut small_run = 0usize;
    for j in 0..spec.max_terms {
        let t = term(j);
        if !t.is_finite() {
            return Err(WgedError::NumericalIntegrity(format!("series term {} is not finite", j)));
        }
        acc.add(t);
        if t.abs() <= spec.term_tol * acc.value().abs() {
            small_run += 1;
            if small_run == 2 {
                return Ok(SeriesSum {
                    sum: acc.value(),
                    terms: j + 1,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(WgedError::Convergence {
        what: format!("series after {} terms", spec.max_terms),
        estimate: acc.value().as_f64(),
        error_bound: f64::NAN,
    })
}

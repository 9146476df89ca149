//! Adaptive Gauss-Legendre quadrature.
//!
//! One engine serves every integral in the crate: a fixed-order Gauss-Legendre
//! rule is applied per panel, the error of a panel is estimated as the
//! difference between the whole-panel rule and the sum of its two halves, and
//! the panel with the largest error is bisected until the accumulated error
//! meets `max(abs_tol, rel_tol * |I|)` or the panel budget is exhausted.
//!
//! Integrands may be vector valued (any [`QuadValue`]), so several integrals
//! sharing expensive inner work are computed from the same nodes. Beta-weighted
//! and semi-infinite integrals are reduced to finite ones by substitution.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Result, WgedError};
use crate::numerics::special::log_beta;
use crate::scalar::Scalar;

/// Accuracy and budget of the adaptive engine.
#[derive(Debug, Clone)]
pub struct QuadratureSpec<T> {
    abs_tol: T,
    rel_tol: T,
    max_subdivisions: usize,
    rule: Arc<Vec<(T, T)>>,
}

impl<T: Scalar> QuadratureSpec<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_subdivisions: usize, fixed_order: usize) -> Result<Self> {
        if !(abs_tol > T::zero()) || !(rel_tol > T::zero()) || max_subdivisions < 1 || fixed_order < 2 {
            return Err(WgedError::domain(format!(
                "quadrature spec needs abs_tol > 0, rel_tol > 0, max_subdivisions >= 1, \
                 fixed_order >= 2; got ({}, {}, {}, {})",
                abs_tol, rel_tol, max_subdivisions, fixed_order
            )));
        }
        let rule = gauss_legendre_f64(fixed_order)
            .iter()
            .map(|&(x, w)| (T::lit(x), T::lit(w)))
            .collect();
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
            rule: Arc::new(rule),
        })
    }

    pub fn abs_tol(&self) -> T {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> T {
        self.rel_tol
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }

    pub fn fixed_order(&self) -> usize {
        self.rule.len()
    }

    /// Same rule, different tolerances.
    pub fn with_tolerances(&self, abs_tol: T, rel_tol: T) -> Result<Self> {
        let mut out = Self::new(abs_tol, rel_tol, self.max_subdivisions, 2)?;
        out.rule = Arc::clone(&self.rule);
        Ok(out)
    }

    fn tolerance_for(&self, estimate: T) -> T {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

impl<T: Scalar> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-10), T::lit(1e-8), 200, 64).expect("default quadrature spec is valid")
    }
}

type Rule = Arc<Vec<(f64, f64)>>;

/// Nodes and weights of the n-point Gauss-Legendre rule on `[-1, 1]`, cached.
pub fn gauss_legendre_f64(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Arc::clone(guard.entry(n).or_insert_with(|| Arc::new(compute_gauss_legendre(n))))
}

fn compute_gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                let (_, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 1 {
        return (x, 1.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A value the adaptive engine can integrate: a scalar or a fixed-size array of them.
pub trait QuadValue<T: Scalar>: Copy + Send + Sync {
    fn zero() -> Self;
    /// `self += w * x`
    fn add_scaled(&mut self, w: T, x: &Self);
    /// Componentwise `|self - other|`.
    fn abs_diff(&self, other: &Self) -> Self;
    /// Calls `f(self_i, other_i)` for every component pair.
    fn zip_visit<F: FnMut(T, T)>(&self, other: &Self, f: &mut F);

    fn all_finite(&self) -> bool {
        let mut ok = true;
        self.zip_visit(self, &mut |x, _| ok &= x.is_finite());
        ok
    }

    fn first(&self) -> T {
        let mut out = None;
        self.zip_visit(self, &mut |x, _| {
            if out.is_none() {
                out = Some(x)
            }
        });
        out.unwrap_or_else(T::nan)
    }
}

impl<T: Scalar> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn add_scaled(&mut self, w: T, x: &Self) {
        *self = *self + w * *x;
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (*self - *other).abs()
    }
    fn zip_visit<F: FnMut(T, T)>(&self, other: &Self, f: &mut F) {
        f(*self, *other)
    }
}

impl<T: Scalar, A: QuadValue<T>, const M: usize> QuadValue<T> for [A; M] {
    fn zero() -> Self {
        [A::zero(); M]
    }
    fn add_scaled(&mut self, w: T, x: &Self) {
        for (s, xi) in self.iter_mut().zip(x) {
            s.add_scaled(w, xi);
        }
    }
    fn abs_diff(&self, other: &Self) -> Self {
        let mut out = *self;
        for (o, b) in out.iter_mut().zip(other) {
            *o = o.abs_diff(b);
        }
        out
    }
    fn zip_visit<F: FnMut(T, T)>(&self, other: &Self, f: &mut F) {
        for (a, b) in self.iter().zip(other) {
            a.zip_visit(b, f);
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<V> {
    pub value: V,
    /// Componentwise error estimate.
    pub error: V,
    pub panels: usize,
    pub evaluations: usize,
}

struct Panel<T, V> {
    lo: T,
    hi: T,
    left: V,
    right: V,
    error: V,
}

fn apply_rule<T, V, F>(f: &mut F, lo: T, hi: T, rule: &[(T, T)], evals: &mut usize) -> Result<V>
where
    T: Scalar,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    let half = (hi - lo) * T::lit(0.5);
    let mid = lo + half;
    let mut acc = V::zero();
    for &(x, w) in rule {
        let y = f(mid + half * x)?;
        if !y.all_finite() {
            return Err(WgedError::NumericalIntegrity(format!(
                "integrand is not finite at {}",
                mid + half * x
            )));
        }
        acc.add_scaled(w * half, &y);
    }
    *evals += rule.len();
    Ok(acc)
}

fn make_panel<T, V, F>(f: &mut F, lo: T, hi: T, whole: V, rule: &[(T, T)], evals: &mut usize) -> Result<Panel<T, V>>
where
    T: Scalar,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    let mid = lo + (hi - lo) * T::lit(0.5);
    let left = apply_rule(f, lo, mid, rule, evals)?;
    let right = apply_rule(f, mid, hi, rule, evals)?;
    let mut halves = left;
    halves.add_scaled(T::one(), &right);
    let error = whole.abs_diff(&halves);
    Ok(Panel {
        lo,
        hi,
        left,
        right,
        error,
    })
}

/// Worst ratio of error to tolerance over all components.
fn error_ratio<T: Scalar, V: QuadValue<T>>(error: &V, estimate: &V, spec: &QuadratureSpec<T>) -> T {
    let mut worst = T::zero();
    error.zip_visit(estimate, &mut |e, v| {
        worst = worst.max(e / spec.tolerance_for(v));
    });
    worst
}

/// Adaptive integration of a fallible, possibly vector-valued integrand over `[lo, hi]`.
pub fn try_integrate<T, V, F>(mut f: F, lo: T, hi: T, spec: &QuadratureSpec<T>) -> Result<Integral<V>>
where
    T: Scalar,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(WgedError::domain(format!(
            "integration bounds must satisfy lo < hi, got [{}, {}]",
            lo, hi
        )));
    }
    let rule = spec.rule.as_slice();
    let mut evals = 0usize;
    let whole = apply_rule(&mut f, lo, hi, rule, &mut evals)?;
    let mut panels = vec![make_panel(&mut f, lo, hi, whole, rule, &mut evals)?];

    loop {
        let mut value = V::zero();
        let mut error = V::zero();
        for p in &panels {
            value.add_scaled(T::one(), &p.left);
            value.add_scaled(T::one(), &p.right);
            error.add_scaled(T::one(), &p.error);
        }
        if error_ratio(&error, &value, spec) <= T::one() {
            return Ok(Integral {
                value,
                error,
                panels: panels.len(),
                evaluations: evals,
            });
        }
        if panels.len() >= spec.max_subdivisions {
            let mut bound = T::zero();
            error.zip_visit(&error, &mut |e, _| bound = bound.max(e));
            return Err(WgedError::Convergence {
                what: format!("adaptive quadrature on [{}, {}] with {} panels", lo, hi, panels.len()),
                estimate: value.first().as_f64(),
                error_bound: bound.as_f64(),
            });
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| {
                let ei = error_ratio(&panels[i].error, &value, spec);
                let ej = error_ratio(&panels[j].error, &value, spec);
                ei.partial_cmp(&ej).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = p.lo + (p.hi - p.lo) * T::lit(0.5);
        if !(p.lo < mid && mid < p.hi) {
            let mut bound = T::zero();
            error.zip_visit(&error, &mut |e, _| bound = bound.max(e));
            return Err(WgedError::Convergence {
                what: format!("adaptive quadrature hit panel width resolution near {}", mid),
                estimate: value.first().as_f64(),
                error_bound: bound.as_f64(),
            });
        }
        panels.push(make_panel(&mut f, p.lo, mid, p.left, rule, &mut evals)?);
        panels.push(make_panel(&mut f, mid, p.hi, p.right, rule, &mut evals)?);
    }
}

/// `∫_lo^hi f(x) dx` for a scalar integrand.
pub fn integrate_finite<T, F>(f: F, lo: T, hi: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    try_integrate(|x| Ok(f(x)), lo, hi, spec).map(|r| r.value)
}

/// `(1/B(u,v)) ∫_0^1 g(a) a^{u-1} (1-a)^{v-1} da`, fallible and vector valued.
///
/// When `u < 1` the left half is integrated in `s = a^u` so the weight
/// `a^{u-1}` is absorbed by the Jacobian; likewise `r = (1-a)^v` on the right
/// half when `v < 1`. The domain is never clipped.
pub fn try_integrate_beta_weighted<T, V, G>(mut g: G, u: T, v: T, spec: &QuadratureSpec<T>) -> Result<V>
where
    T: Scalar,
    V: QuadValue<T>,
    G: FnMut(T) -> Result<V>,
{
    let log_b = log_beta(u, v)?;
    let one = T::one();
    let half = T::lit(0.5);
    let mut total = V::zero();

    if u >= one && v >= one {
        let r = try_integrate(
            |a: T| {
                let w = ((u - one) * a.ln() + (v - one) * (-a).ln_1p() - log_b).exp();
                let y = g(a)?;
                let mut out = V::zero();
                out.add_scaled(w, &y);
                Ok(out)
            },
            T::zero(),
            one,
            spec,
        )?;
        return Ok(r.value);
    }

    // Left half, a in (0, 1/2].
    let left = if u < one {
        let inv_u = u.recip();
        try_integrate(
            |s: T| {
                let a = s.powf(inv_u);
                let w = ((v - one) * (-a).ln_1p() - log_b).exp() * inv_u;
                let y = g(a)?;
                let mut out = V::zero();
                out.add_scaled(w, &y);
                Ok(out)
            },
            T::zero(),
            half.powf(u),
            spec,
        )?
    } else {
        try_integrate(
            |a: T| {
                let w = ((u - one) * a.ln() + (v - one) * (-a).ln_1p() - log_b).exp();
                let y = g(a)?;
                let mut out = V::zero();
                out.add_scaled(w, &y);
                Ok(out)
            },
            T::zero(),
            half,
            spec,
        )?
    };
    total.add_scaled(one, &left.value);

    // Right half, a in [1/2, 1).
    let right = if v < one {
        let inv_v = v.recip();
        try_integrate(
            |r: T| {
                let one_minus_a = r.powf(inv_v);
                let a = one - one_minus_a;
                let w = ((u - one) * a.ln() - log_b).exp() * inv_v;
                let y = g(a)?;
                let mut out = V::zero();
                out.add_scaled(w, &y);
                Ok(out)
            },
            T::zero(),
            half.powf(v),
            spec,
        )?
    } else {
        try_integrate(
            |a: T| {
                let w = ((u - one) * a.ln() + (v - one) * (-a).ln_1p() - log_b).exp();
                let y = g(a)?;
                let mut out = V::zero();
                out.add_scaled(w, &y);
                Ok(out)
            },
            half,
            one,
            spec,
        )?
    };
    total.add_scaled(one, &right.value);
    Ok(total)
}

/// Expectation of `g` under a beta(u, v) weight on (0, 1).
pub fn integrate_beta_weighted<T, G>(g: G, u: T, v: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Scalar,
    G: Fn(T) -> T,
{
    try_integrate_beta_weighted(|a| Ok(g(a)), u, v, spec)
}

/// `∫_0^∞ f(x) dx` through `x = scale * t / (1 - t)`, `t ∈ (0, 1)`.
///
/// `scale` should be of the order of the integrand's bulk (a posterior mean,
/// say); `scale = 1` is the plain rational map.
pub fn try_integrate_semi_infinite_scaled<T, V, F>(mut f: F, scale: T, spec: &QuadratureSpec<T>) -> Result<V>
where
    T: Scalar,
    V: QuadValue<T>,
    F: FnMut(T) -> Result<V>,
{
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(WgedError::domain(format!("semi-infinite scale must be positive, got {}", scale)));
    }
    let one = T::one();
    try_integrate(
        |t: T| {
            let omt = one - t;
            let x = scale * t / omt;
            let jac = scale / (omt * omt);
            let y = f(x)?;
            if !y.all_finite() {
                return Err(WgedError::NumericalIntegrity(format!("integrand is not finite at x = {}", x)));
            }
            let mut out = V::zero();
            out.add_scaled(jac, &y);
            // Rapidly decaying integrands underflow to zero times a huge Jacobian.
            Ok(if out.all_finite() { out } else { V::zero() })
        },
        T::zero(),
        one,
        spec,
    )
    .map(|r| r.value)
}

/// `∫_0^∞ f(x) dx` via the rational map `x = t / (1 - t)`.
pub fn integrate_semi_infinite<T, F>(f: F, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    try_integrate_semi_infinite_scaled(|x| Ok(f(x)), T::one(), spec)
}

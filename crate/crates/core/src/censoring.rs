//! Progressive type-II censoring.
//!
//! `n` units go on test; at the `i`-th observed failure `R_i` surviving units
//! are withdrawn, so `m` failures are observed and `Σ R_i + m = n`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::KnownShape;
use crate::error::{Result, WgedError};
use crate::scalar::{CompensatedSum, Scalar};

/// A censoring plan `(R_1, ..., R_m)` for `n` units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CensoringScheme {
    n: usize,
    removals: Vec<usize>,
}

impl CensoringScheme {
    pub fn new(n: usize, removals: Vec<usize>) -> Result<Self> {
        let m = removals.len();
        if m == 0 {
            return Err(WgedError::Scheme("at least one failure must be observed".into()));
        }
        let removed: usize = removals.iter().sum();
        if removed + m != n {
            let deficit = n as i64 - (removed + m) as i64;
            return Err(WgedError::Scheme(format!(
                "m + sum(R) = {} + {} = {} but n = {} (deficit {})",
                m,
                removed,
                removed + m,
                n,
                deficit
            )));
        }
        Ok(Self { n, removals })
    }

    /// No censoring: `m = n`, all removals zero.
    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, vec![0; n])
    }

    /// Parses the `v` / `v*k` list grammar (`"4,4,1,0*7"`) and checks it against `n`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let removals = parse_removals(text)?;
        Self::new(n, removals)
    }

    /// Parses a scheme and takes `n = m + Σ R_i`.
    pub fn parse_implied(text: &str) -> Result<Self> {
        let removals = parse_removals(text)?;
        let n = removals.len() + removals.iter().sum::<usize>();
        Self::new(n, removals)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.removals.len()
    }

    pub fn removals(&self) -> &[usize] {
        &self.removals
    }

    /// Fraction `m / n` of units observed to fail.
    pub fn observed_fraction(&self) -> f64 {
        self.m() as f64 / self.n as f64
    }

    /// Text form with runs of three or more written `v*k`, e.g. `4,4,1,0*7`.
    pub fn render(&self) -> String {
        let mut items = Vec::new();
        let mut iter = self.removals.iter().peekable();
        while let Some(&v) = iter.next() {
            let mut count = 1;
            while iter.peek() == Some(&&v) {
                iter.next();
                count += 1;
            }
            if count < 3 {
                items.extend(std::iter::repeat_n(v.to_string(), count));
            } else {
                items.push(format!("{}*{}", v, count));
            }
        }
        items.join(",")
    }
}

impl fmt::Display for CensoringScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, m={}; R=({})", self.n, self.m(), self.render())
    }
}

impl Serialize for CensoringScheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            scheme: &'a str,
        }
        Repr {
            n: self.n,
            scheme: &self.render(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CensoringScheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: Option<usize>,
            scheme: String,
        }
        let r = Repr::deserialize(d)?;
        match r.n {
            Some(n) => CensoringScheme::parse(&r.scheme, n),
            None => CensoringScheme::parse_implied(&r.scheme),
        }
        .map_err(serde::de::Error::custom)
    }
}

fn parse_removals(text: &str) -> Result<Vec<usize>> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let body = cleaned
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(&cleaned);
    if body.is_empty() {
        return Err(WgedError::Parse("empty censoring scheme".into()));
    }
    let mut out = Vec::new();
    for item in body.split(',') {
        let (value, count) = match item.split_once('*') {
            Some((v, k)) => (v, k),
            None => (item, "1"),
        };
        let value: usize = value
            .parse()
            .map_err(|_| WgedError::Parse(format!("bad removal count {:?} in item {:?}", value, item)))?;
        let count: usize = count
            .parse()
            .map_err(|_| WgedError::Parse(format!("bad repeat count {:?} in item {:?}", count, item)))?;
        if count == 0 {
            return Err(WgedError::Parse(format!("repeat count must be >= 1 in item {:?}", item)));
        }
        out.extend(std::iter::repeat_n(value, count));
    }
    Ok(out)
}

/// Observed ordered failure times under a censoring plan.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSample<T> {
    scheme: CensoringScheme,
    times: Vec<T>,
}

impl<T: Scalar> CensoredSample<T> {
    /// Positive, nondecreasing times, one per observed failure. Ties are allowed.
    pub fn new(scheme: CensoringScheme, times: Vec<T>) -> Result<Self> {
        if times.len() != scheme.m() {
            return Err(WgedError::Scheme(format!(
                "scheme observes m = {} failures but {} times were given",
                scheme.m(),
                times.len()
            )));
        }
        for (i, &x) in times.iter().enumerate() {
            if !(x > T::zero() && x.is_finite()) {
                return Err(WgedError::domain(format!("failure time #{} = {} is not positive", i + 1, x)));
            }
            if i > 0 && x < times[i - 1] {
                return Err(WgedError::domain(format!(
                    "failure times must be nondecreasing: #{} = {} < #{} = {}",
                    i + 1,
                    x,
                    i,
                    times[i - 1]
                )));
            }
        }
        Ok(Self { scheme, times })
    }

    /// Applies a plan retrospectively to a complete ordered sample of `n` times:
    /// each observed failure is followed by the withdrawal of the next `R_i`
    /// units in the list.
    pub fn from_complete(complete: &[T], scheme: &CensoringScheme) -> Result<Self> {
        if complete.len() != scheme.n() {
            return Err(WgedError::Scheme(format!(
                "complete sample has {} units but the scheme is for n = {}",
                complete.len(),
                scheme.n()
            )));
        }
        let mut times = Vec::with_capacity(scheme.m());
        let mut pos = 0;
        for &r in scheme.removals() {
            times.push(complete[pos]);
            pos += 1 + r;
        }
        Self::new(scheme.clone(), times)
    }

    pub fn scheme(&self) -> &CensoringScheme {
        &self.scheme
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn summary(&self, lambda: T, theta: T) -> Result<SampleSummary<T>> {
        compute_s_m(self, &KnownShape::new(lambda, theta)?)
    }
}

/// The pair `(m, S_m)` through which every estimator sees the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary<T> {
    pub m: usize,
    pub s_m: T,
}

impl<T: Scalar> SampleSummary<T> {
    pub fn new(m: usize, s_m: T) -> Result<Self> {
        if m == 0 {
            return Err(WgedError::DegenerateSample("m must be at least 1".into()));
        }
        if !(s_m >= T::zero() && s_m.is_finite()) {
            return Err(WgedError::DegenerateSample(format!("S_m must be finite and nonnegative, got {}", s_m)));
        }
        Ok(Self { m, s_m })
    }

    pub fn m_scalar(&self) -> T {
        T::from_count(self.m)
    }

    /// Same `m`, `S_m` multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            m: self.m,
            s_m: self.s_m * factor,
        }
    }
}

/// Reads failure times written one per line. Blank lines and text after `#`
/// are ignored; errors name the offending 1-based line.
pub fn parse_times(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let x: f64 = body
            .parse()
            .map_err(|_| WgedError::Parse(format!("line {}: {:?} is not a number", i + 1, body)))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(WgedError::Parse(format!("line {}: failure time must be positive, got {}", i + 1, body)));
        }
        out.push(x);
    }
    if out.is_empty() {
        return Err(WgedError::Parse("no failure times found".into()));
    }
    Ok(out)
}

/// `S_m = Σ (R_i + 1) (e^{λ x_i} - 1)^θ`.
pub fn compute_s_m<T: Scalar>(sample: &CensoredSample<T>, known: &KnownShape<T>) -> Result<SampleSummary<T>> {
    let mut acc = CompensatedSum::new();
    for (&x, &r) in sample.times.iter().zip(sample.scheme.removals()) {
        acc.add(T::from_count(r + 1) * known.transformed_time(x)?);
    }
    SampleSummary::new(sample.scheme.m(), acc.value())
}

/// Draws a progressive type-II censored sample from the lifetime distribution
/// with inverse cdf `quantile`.
///
/// Uniform-spacings construction: with `W_i` i.i.d. uniform,
/// `V_i = W_i^{1/(i + R_m + ... + R_{m-i+1})}` and
/// `U_i = 1 - V_m V_{m-1} ... V_{m-i+1}` are progressively censored uniform
/// order statistics, and `x_i = quantile(U_i)`. Samples with tied times are
/// redrawn.
pub fn generate_sample<T, Q, R>(scheme: &CensoringScheme, quantile: Q, rng: &mut R) -> Result<CensoredSample<T>>
where
    T: Scalar,
    Q: Fn(T) -> Result<T>,
    R: Rng + ?Sized,
{
    let m = scheme.m();
    let removals = scheme.removals();
    // gamma_i = i + R_m + ... + R_{m-i+1}, for i = 1..=m
    let mut gammas = Vec::with_capacity(m);
    let mut tail = 0usize;
    for i in 1..=m {
        tail += removals[m - i];
        gammas.push((i + tail) as f64);
    }
    let mut log_v = vec![0.0f64; m];
    loop {
        for (i, lv) in log_v.iter_mut().enumerate() {
            let w: f64 = loop {
                let w: f64 = rng.random();
                if w > 0.0 {
                    break w;
                }
            };
            *lv = w.ln() / gammas[i];
        }
        // U_i = 1 - exp(Σ_{j=m-i+1}^{m} ln V_j), V indexed from 1.
        let mut times = Vec::with_capacity(m);
        let mut partial = 0.0f64;
        let mut ok = true;
        for i in 1..=m {
            partial += log_v[m - i];
            let u = -partial.exp_m1();
            if !(u > 0.0 && u < 1.0) {
                ok = false;
                break;
            }
            let x = quantile(T::lit(u))?;
            if !(x > T::zero()) || times.last().is_some_and(|&prev| x <= prev) {
                ok = false;
                break;
            }
            times.push(x);
        }
        if ok {
            return CensoredSample::new(scheme.clone(), times);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn times_file_parsing() {
        assert_eq!(parse_times("# hdr\n0.19\n\n 0.78  # x\n").unwrap(), vec![0.19, 0.78]);
        let e = parse_times("1.0\nabc\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(parse_times("1\n-2\n").unwrap_err().to_string().contains("line 2"));
        assert!(parse_times("\n# only\n").is_err());
    }

    #[test]
    fn parse_electric_schemes() {
        let s = CensoringScheme::parse("4,4,1,0*7", 19).unwrap();
        assert_eq!(s.m(), 10);
        assert_eq!(s.removals(), &[4, 4, 1, 0, 0, 0, 0, 0, 0, 0]);
        let s = CensoringScheme::parse("0*19", 19).unwrap();
        assert_eq!(s.m(), 19);
        assert!(s.removals().iter().all(|&r| r == 0));
        let s = CensoringScheme::parse("5*3,0*12", 30).unwrap();
        assert_eq!(s.m(), 15);
        assert_eq!(s.removals().iter().sum::<usize>(), 15);
        let s = CensoringScheme::parse(" ( 1*4 , 0*11 ) ", 19).unwrap();
        assert_eq!(s.m(), 15);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(CensoringScheme::parse("4,x", 10), Err(WgedError::Parse(_))));
        assert!(matches!(CensoringScheme::parse("4*0", 10), Err(WgedError::Parse(_))));
        assert!(matches!(CensoringScheme::parse("", 10), Err(WgedError::Parse(_))));
        assert!(matches!(CensoringScheme::parse("-1,2", 10), Err(WgedError::Parse(_))));
        match CensoringScheme::parse("4,4,1,0*7", 20) {
            Err(WgedError::Scheme(msg)) => assert!(msg.contains("deficit 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn render_compresses_runs() {
        let s = CensoringScheme::parse("4,4,1,0*7", 19).unwrap();
        assert_eq!(s.render(), "4,4,1,0*7");
        assert_eq!(CensoringScheme::parse("1*4,0*11", 19).unwrap().render(), "1*4,0*11");
        assert_eq!(CensoringScheme::parse(&s.render(), 19).unwrap(), s);
    }

    #[test]
    fn skip_convention_on_complete_data() {
        let data: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let s = CensoringScheme::parse("2,1,0*5", 10).unwrap();
        let sample = CensoredSample::from_complete(&data, &s).unwrap();
        assert_eq!(sample.times(), &[1.0, 4.0, 6.0, 7.0, 8.0, 9.0, 10.0]);
    }

    #[test]
    fn sample_validation() {
        let s = CensoringScheme::complete(3).unwrap();
        assert!(CensoredSample::new(s.clone(), vec![1.0, 2.0]).is_err());
        assert!(CensoredSample::new(s.clone(), vec![0.0, 1.0, 2.0]).is_err());
        assert!(CensoredSample::new(s.clone(), vec![2.0, 1.0, 3.0]).is_err());
        assert!(CensoredSample::new(s, vec![1.0, 1.0, 3.0]).is_ok());
    }

    #[test]
    fn s_m_single_observation() {
        let known = KnownShape::new(0.022, 1.95).unwrap();
        let s = CensoredSample::new(CensoringScheme::complete(1).unwrap(), vec![7.5]).unwrap();
        let summary = compute_s_m(&s, &known).unwrap();
        assert_eq!(summary.s_m, known.transformed_time(7.5).unwrap());
    }

    #[test]
    fn s_m_vanishes_near_origin() {
        let known = KnownShape::new(0.022, 1.95).unwrap();
        let s = CensoredSample::new(CensoringScheme::complete(3).unwrap(), vec![1e-9, 2e-9, 3e-9]).unwrap();
        assert!(compute_s_m(&s, &known).unwrap().s_m < 1e-18);
    }

    #[test]
    fn generation_is_deterministic() {
        let scheme = CensoringScheme::parse("4,4,2,0*7", 20).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            generate_sample(&scheme, |p: f64| Ok(p), &mut rng).unwrap()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
        let s = draw(7);
        assert!(s.times().windows(2).all(|w| w[0] < w[1]));
    }

    /// Kolmogorov-Smirnov distance of a sample against a continuous cdf.
    fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
        let n = sorted.len() as f64;
        sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn complete_uniform_sample_passes_ks() {
        let n = 10_000;
        let scheme = CensoringScheme::complete(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let s = generate_sample(&scheme, |p: f64| Ok(p), &mut rng).unwrap();
        let d = ks_distance(s.times(), |x| x);
        assert!(d < 1.63 / (n as f64).sqrt(), "KS distance {d}");
    }

    #[test]
    fn first_order_statistic_distribution() {
        // With n = m = 20 the first coordinate is the minimum: P(X_(1) <= x) = 1 - (1-x)^20.
        let scheme = CensoringScheme::complete(20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut firsts: Vec<f64> = (0..5000)
            .map(|_| generate_sample(&scheme, |p: f64| Ok(p), &mut rng).unwrap().times()[0])
            .collect();
        firsts.sort_by(f64::total_cmp);
        let d = ks_distance(&firsts, |x| 1.0 - (1.0 - x).powi(20));
        assert!(d < 1.63 / 5000f64.sqrt(), "KS distance {d}");
    }

    #[test]
    fn censored_first_failure_mean() {
        // Under any plan the first failure is the minimum of n uniforms: mean 1/(n+1).
        let scheme = CensoringScheme::parse("5*3,0*12", 30).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let reps = 20_000;
        let mean: f64 = (0..reps)
            .map(|_| generate_sample(&scheme, |p: f64| Ok(p), &mut rng).unwrap().times()[0])
            .sum::<f64>()
            / reps as f64;
        let sd = (30.0 / (31.0f64.powi(2) * 32.0)).sqrt() / (reps as f64).sqrt();
        assert!((mean - 1.0 / 31.0).abs() < 4.0 * sd, "{mean}");
    }

    proptest! {
        #[test]
        fn parse_render_roundtrip(removals in proptest::collection::vec(0usize..4, 1..30)) {
            let n = removals.len() + removals.iter().sum::<usize>();
            let s = CensoringScheme::new(n, removals.clone()).unwrap();
            let back = CensoringScheme::parse(&s.render(), n).unwrap();
            prop_assert_eq!(&back, &s);
            let expanded = removals.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
            prop_assert_eq!(CensoringScheme::parse(&expanded, n).unwrap(), s);
        }

        #[test]
        fn constructor_enforces_balance(removals in proptest::collection::vec(0usize..4, 1..20), extra in 1usize..5) {
            let n = removals.len() + removals.iter().sum::<usize>();
            prop_assert!(CensoringScheme::new(n + extra, removals.clone()).is_err());
            prop_assert!(CensoringScheme::new(n, removals).is_ok());
        }

        #[test]
        fn s_m_independent_of_scheme_text_form(removals in proptest::collection::vec(0usize..3, 1..15)) {
            let n = removals.len() + removals.iter().sum::<usize>();
            let compressed = CensoringScheme::new(n, removals.clone()).unwrap();
            let expanded_text = removals.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
            let expanded = CensoringScheme::parse(&expanded_text, n).unwrap();
            let times: Vec<f64> = (1..=removals.len()).map(|i| i as f64 * 0.7).collect();
            let known = KnownShape::new(0.3, 1.4).unwrap();
            let a = compute_s_m(&CensoredSample::new(compressed, times.clone()).unwrap(), &known).unwrap();
            let b = compute_s_m(&CensoredSample::new(expanded, times).unwrap(), &known).unwrap();
            prop_assert_eq!(a.s_m.to_bits(), b.s_m.to_bits());
        }
    }
}

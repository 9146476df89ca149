use wged::censoring::{CensoredSample, SampleSummary};
use wged::distribution::KnownShape;
use wged::electric;
use wged::estimators::{ebayes_alpha_self, mle_alpha, HyperPrior};
use wged::{CensoringScheme, WgedParamsF32};

#[test]
fn f32_estimates_track_f64() {
    let scheme = CensoringScheme::parse("0*19", 19).unwrap();
    let times32: Vec<f32> = electric::FAILURE_TIMES.iter().map(|&x| x as f32).collect();
    let s32: SampleSummary<f32> = CensoredSample::from_complete(&times32, &scheme)
        .unwrap()
        .summary(electric::LAMBDA as f32, electric::THETA as f32)
        .unwrap();
    let s64 = CensoredSample::from_complete(&electric::FAILURE_TIMES, &scheme)
        .unwrap()
        .summary(electric::LAMBDA, electric::THETA)
        .unwrap();
    let rel = |a: f32, b: f64| ((a as f64 - b) / b).abs();
    assert!(rel(mle_alpha(&s32).unwrap(), mle_alpha(&s64).unwrap()) < 1e-5);
    let h32 = HyperPrior::new(0.13f32, 2.0, 1.12).unwrap();
    let h64 = HyperPrior::new(0.13, 2.0, 1.12).unwrap();
    let t32 = ebayes_alpha_self(&s32, &h32).unwrap();
    let t64 = ebayes_alpha_self(&s64, &h64).unwrap();
    for i in 0..3 {
        assert!(rel(t32.values[i], t64.values[i]) < 1e-5);
    }
}

#[test]
fn f32_distribution_functions() {
    let p = WgedParamsF32::new(0.9570615, 3.0, 2.5).unwrap();
    let x = p.quantile(0.3).unwrap();
    assert!((p.cdf(x).unwrap() - 0.3).abs() < 1e-5);
    let k = KnownShape::new(3.0f32, 2.5).unwrap();
    assert!((p.hazard(0.1).unwrap() - 2.005066).abs() < 1e-4);
    assert!(k.transformed_time(0.1).unwrap() > 0.0);
}

//! Acceptance criteria for the estimation library and CLI.
//!
//! Every test prints exactly one verdict line of the form
//! `[criterion N] PASS|FAIL <title>: <details>` to stderr (bypassing the test
//! harness capture, so the lines appear in `cargo test` output) and then
//! asserts the verdict. Tolerances are fixed in the constants below.

use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use wged::censoring::{generate_sample, CensoredSample};
use wged::electric;
use wged::estimators::{estimate_all, Estimator, MethodSet, PriorId, Target};
use wged::montecarlo::{run_simulation, verify_orderings, MseTable, SimConfig};
use wged::{CensoringScheme, SystemQuery, WgedParams};
use wged_cli::commands::execute;
use wged_cli::config::EstimateConfig;
use wged_cli::manifest::{RunSpec, SimulateRun};
use wged_cli::suites;
use wged_validation::{published, PublishedRow};

const GOLDEN_RUNTIME_S: f64 = 60.0;
const ANCHOR_TOL: f64 = 1e-6;
const ORACLE_TRIALS: usize = 100;
const THEOREM_TRIALS: usize = 1000;
const LINEX_CONTINUITY_Q: f64 = 1e-6;
const LINEX_CONTINUITY_TOL: f64 = 1e-4;
const KS_N: usize = 5000;
const KS_SEEDS: u64 = 20;
const KS_LEVEL: f64 = 0.01;
const KS_MIN_PASSES: usize = 19;
const MC_REPLICATIONS: usize = 2000;
const MC_FULL_REPLICATIONS: usize = 5000;
const MC_MSE_REL_TOL: f64 = 0.20;
const MC_RUNTIME_S: f64 = 15.0 * 60.0;
const SEED: u64 = 20240601;

fn verdict(id: &str, title: &str, pass: bool, detail: &str) {
    let line = format!("[criterion {}] {} {}: {}", id, if pass { "PASS" } else { "FAIL" }, title, detail);
    let _ = writeln!(std::io::stderr(), "{}", line);
    assert!(pass, "{}", line);
}

fn simulation_config() -> SimConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/configs/table3.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn criterion_1_electric_golden_reproduction() {
    let start = Instant::now();
    let cells = suites::golden_cells().unwrap();
    let secs = start.elapsed().as_secs_f64();
    let failed: Vec<_> = cells.iter().filter(|c| !c.pass).collect();
    let failed_closed = failed.iter().filter(|c| c.closed_form).count();
    let mut blocks: Vec<String> = Vec::new();
    for c in &failed {
        let key = format!("{} {}", c.target, c.estimator);
        if !blocks.contains(&key) {
            blocks.push(key);
        }
    }
    let worst = failed.iter().map(|c| c.abs_err).fold(0.0, f64::max);
    let detail = format!(
        "{}/{} cells in tolerance ({} closed-form and {} quadrature cells out, worst |err| {:.2e}; failing columns: {}); {:.2}s",
        cells.len() - failed.len(),
        cells.len(),
        failed_closed,
        failed.len() - failed_closed,
        worst,
        if blocks.is_empty() { "none".to_string() } else { blocks.join(", ") },
        secs
    );
    verdict("1", "electric-data golden reproduction", failed.is_empty() && secs <= GOLDEN_RUNTIME_S, &detail);
}

#[test]
fn criterion_2_true_value_anchors() {
    let p = WgedParams::new(0.9570615, 3.0, 2.5).unwrap();
    let rs = p.reliability_system(&SystemQuery::series(0.1, 5).unwrap()).unwrap();
    let rp = p.reliability_system(&SystemQuery::parallel(0.25, 5).unwrap()).unwrap();
    let h = p.hazard(0.1).unwrap();
    let errs = [(rs - 0.7071934).abs(), (rp - 0.8106066).abs(), (h - 2.005066).abs()];
    let detail = format!(
        "R_s = {:.9} (|err| {:.1e}), R_p = {:.9} (|err| {:.1e}), h = {:.9} (|err| {:.1e})",
        rs, errs[0], rp, errs[1], h, errs[2]
    );
    verdict("2", "true-value anchors", errs.iter().all(|&e| e <= ANCHOR_TOL), &detail);
}

#[test]
fn criterion_3_closed_form_vs_oracle() {
    let o = suites::oracles(ORACLE_TRIALS, SEED).unwrap();
    let worst: Vec<String> = o.worst.iter().map(|(n, w)| format!("{} {:.1e}", n, w)).collect();
    let detail = format!(
        "{} configurations, {} comparisons, {} out of tolerance (E-Bayes {:.0e}, Bayes {:.0e}); worst: {}",
        o.trials,
        o.checks,
        o.failures.len(),
        suites::EBAYES_ORACLE_TOL,
        suites::BAYES_ORACLE_TOL,
        worst.join(", ")
    );
    verdict("3", "closed form vs quadrature oracle", o.pass() && o.trials >= 100, &detail);
}

#[test]
fn criterion_4_theorem_properties() {
    let o = suites::theorems(THEOREM_TRIALS, SEED).unwrap();
    let parts: Vec<String> = o
        .tallies
        .iter()
        .map(|t| {
            format!(
                "{}: order fails {} ({} unresolved below {:.0e} relative spread), spacing fails {} (max {:.1e}), contraction {}/{} in [{}, {}] (observed {:.3}..{:.3})",
                t.name,
                t.ordering_failures,
                t.unresolved,
                wged::estimators::GAP_RESOLUTION,
                t.spacing_failures,
                t.max_spacing_residual,
                t.contraction_trials - t.contraction_failures,
                t.contraction_trials,
                suites::CONTRACTION_RANGE.0,
                suites::CONTRACTION_RANGE.1,
                t.contraction_min,
                t.contraction_max
            )
        })
        .collect();
    let detail = format!("{} configurations; {}", o.trials, parts.join("; "));
    verdict("4", "theorem property suite", o.pass(), &detail);
}

#[test]
fn criterion_5_linex_continuity() {
    let mut settings = EstimateConfig::default();
    let base = settings.setup().unwrap();
    settings.loss_qs.alpha = LINEX_CONTINUITY_Q;
    settings.loss_qs.series = LINEX_CONTINUITY_Q;
    settings.loss_qs.parallel = LINEX_CONTINUITY_Q;
    settings.loss_qs.hazard = LINEX_CONTINUITY_Q;
    let tiny = settings.setup().unwrap();
    let mut pairs = vec![(Estimator::BayesSelf, Estimator::BayesLinex)];
    pairs.extend(PriorId::ALL.iter().map(|&p| (Estimator::EbayesSelf(p), Estimator::EbayesLinex(p))));

    let mut worst = (0.0f64, String::new());
    let mut count = 0;
    for text in electric::SCHEMES {
        let scheme = CensoringScheme::parse(text, electric::FAILURE_TIMES.len()).unwrap();
        let summary = CensoredSample::from_complete(&electric::FAILURE_TIMES, &scheme)
            .unwrap()
            .summary(electric::LAMBDA, electric::THETA)
            .unwrap();
        let a = estimate_all(&summary, &base, MethodSet::ALL).unwrap();
        let b = estimate_all(&summary, &tiny, MethodSet::ALL).unwrap();
        for target in Target::ALL {
            for &(s, l) in &pairs {
                let d = (a.get(target, s).unwrap() - b.get(target, l).unwrap()).abs();
                count += 1;
                if d >= worst.0 {
                    worst = (d, format!("{} {} vs {} under {}", target, l, s, text));
                }
            }
        }
    }
    let detail = format!(
        "{} estimator pairs at q = {:e}; max |LINEX - SELF| = {:.2e} ({})",
        count, LINEX_CONTINUITY_Q, worst.0, worst.1
    );
    verdict("5", "LINEX continuity", worst.0 <= LINEX_CONTINUITY_TOL, &detail);
}

/// Asymptotic Kolmogorov tail probability with Stephens' small-sample correction.
fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for j in 1..=100 {
        let term = 2.0 * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        p += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

#[test]
fn criterion_6_sampling_correctness() {
    let p = WgedParams::new(0.9570615, 3.0, 2.5).unwrap();
    let scheme = CensoringScheme::complete(KS_N).unwrap();
    let mut passes = 0;
    let mut pvalues = Vec::new();
    for seed in 0..KS_SEEDS {
        let mut rng = ChaCha20Rng::seed_from_u64(SEED + seed);
        let sample = generate_sample(&scheme, |u| p.quantile(u), &mut rng).unwrap();
        let x = sample.times();
        let n = x.len() as f64;
        let d = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| {
                let f = p.cdf(xi).unwrap();
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max);
        let pv = ks_pvalue(d, x.len());
        pvalues.push(pv);
        if pv >= KS_LEVEL {
            passes += 1;
        }
    }
    let min_p = pvalues.iter().cloned().fold(1.0, f64::min);
    let detail = format!(
        "{}/{} seeds pass KS at the {} level with n = {} (min p = {:.3})",
        passes, KS_SEEDS, KS_LEVEL, KS_N, min_p
    );
    verdict("6", "sampling correctness", passes >= KS_MIN_PASSES, &detail);
}

fn published_row(rows: &'static [PublishedRow], scheme: &CensoringScheme) -> &'static PublishedRow {
    rows.iter()
        .find(|r| CensoringScheme::parse(r.scheme, r.n).unwrap() == *scheme)
        .expect("scheme is tabulated")
}

fn published_block(target: Target) -> &'static [PublishedRow] {
    match target {
        Target::Alpha => &published::ALPHA,
        Target::Series => &published::SERIES,
        Target::Parallel => &published::PARALLEL,
        Target::Hazard => &published::HAZARD,
    }
}

/// Checks chains, decrease in `n`, and MSE magnitudes; returns (pass, detail).
fn monte_carlo_verdict(table: &MseTable, secs: f64) -> (bool, String) {
    let orderings = verify_orderings(table);
    let failed_links: Vec<String> = orderings
        .links
        .iter()
        .filter(|l| !l.holds)
        .map(|l| format!("n={} {} {} {}<{}", l.scheme.n(), l.target, l.chain, l.lhs, l.rhs))
        .collect();
    let failed_mono: Vec<String> = orderings
        .monotone
        .iter()
        .filter(|m| !m.holds)
        .map(|m| format!("{} {} n={}->{}", m.target, m.estimator, m.smaller.n(), m.larger.n()))
        .collect();

    let mut cells = 0;
    let mut worst_mean = (0.0f64, String::new());
    let mut off: Vec<String> = Vec::new();
    let mut off_by_target = [0usize; 4];
    for scheme in table.schemes() {
        for target in Target::ALL {
            let row = published_row(published_block(target), &scheme);
            for est in Estimator::ALL {
                let got = table.get(&scheme, target, est).unwrap();
                let mean_dev = ((got.mean - row.mean[est.index()]) / row.mean[est.index()]).abs();
                if mean_dev > worst_mean.0 {
                    worst_mean = (mean_dev, format!("n={} {} {}", scheme.n(), target, est));
                }
                let ours = got.mse;
                let theirs = row.mse[est.index()];
                cells += 1;
                if ((ours - theirs) / theirs).abs() > MC_MSE_REL_TOL {
                    off_by_target[target.index()] += 1;
                    if off.len() < 6 {
                        off.push(format!("n={} {} {} {:.3e} vs {:.3e}", scheme.n(), target, est, ours, theirs));
                    }
                }
            }
        }
    }
    let n_off: usize = off_by_target.iter().sum();
    let a = failed_links.is_empty();
    let b = failed_mono.is_empty();
    let c = n_off == 0;
    let detail = format!(
        "N = {}, {:.0}s; (a) chains {}/{} links hold{}; (b) decrease in n {}/{}{}; (c) {}/{} MSEs within {:.0}% (out of range per target alpha/series/parallel/hazard: {:?}){}; mean estimates within {:.2}% of published (worst {})",
        table.replications,
        secs,
        orderings.links.len() - failed_links.len(),
        orderings.links.len(),
        if a { String::new() } else { format!(" [fails: {}]", failed_links.join(", ")) },
        orderings.monotone.len() - failed_mono.len(),
        orderings.monotone.len(),
        if b { String::new() } else { format!(" [fails: {}]", failed_mono.join(", ")) },
        cells - n_off,
        cells,
        MC_MSE_REL_TOL * 100.0,
        off_by_target,
        if c { String::new() } else { format!(" [e.g. {}]", off.join("; ")) },
        worst_mean.0 * 100.0,
        worst_mean.1
    );
    (a && b && c, detail)
}

#[test]
fn criterion_7_monte_carlo_desk_scale() {
    let mut cfg = simulation_config();
    cfg.schemes = vec![
        CensoringScheme::parse("0*20", 20).unwrap(),
        CensoringScheme::parse("0*50", 50).unwrap(),
    ];
    cfg.replications = MC_REPLICATIONS;
    cfg.master_seed = SEED;
    let start = Instant::now();
    let table = run_simulation(&cfg, 0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = monte_carlo_verdict(&table, secs);
    verdict("7", "Monte Carlo desk-scale reproduction", pass && secs <= MC_RUNTIME_S, &detail);
}

#[test]
#[ignore = "full-scale study: 12 plans x 5000 replications; run with --ignored"]
fn criterion_7_monte_carlo_full_scale() {
    let mut cfg = simulation_config();
    cfg.replications = MC_FULL_REPLICATIONS;
    cfg.master_seed = SEED;
    let start = Instant::now();
    let table = run_simulation(&cfg, 0).unwrap();
    let (pass, detail) = monte_carlo_verdict(&table, start.elapsed().as_secs_f64());
    verdict("7-full", "Monte Carlo full-scale reproduction", pass, &detail);
}

#[test]
fn criterion_8_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = simulation_config();
    cfg.schemes = vec![
        CensoringScheme::parse("4,4,2,0*7", 20).unwrap(),
        CensoringScheme::parse("0*30", 30).unwrap(),
    ];
    cfg.replications = 24;
    cfg.master_seed = 7;

    let runs = [("a", 1), ("b", 1), ("c", 3)];
    for (name, workers) in runs {
        let run = RunSpec::Simulate(SimulateRun {
            config: cfg.clone(),
            workers,
        });
        let dir = tmp.path().join(name);
        std::fs::create_dir_all(&dir).unwrap();
        execute(&run, Some(&dir), workers).unwrap();
    }
    let files = ["mse_table.csv", "ordering_verdicts.csv", "fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv"];
    let mut identical = 0;
    let mut differing = Vec::new();
    for f in files {
        let bytes: Vec<Vec<u8>> = runs
            .iter()
            .map(|(name, _)| std::fs::read(tmp.path().join(name).join(f)).unwrap())
            .collect();
        if bytes.windows(2).all(|w| w[0] == w[1]) && !bytes[0].is_empty() {
            identical += 1;
        } else {
            differing.push(f);
        }
    }
    let detail = format!(
        "{}/{} CSV files byte-identical across two 1-worker runs and a 3-worker run{}",
        identical,
        files.len(),
        if differing.is_empty() { String::new() } else { format!(" (differ: {})", differing.join(", ")) }
    );
    verdict("8", "determinism", differing.is_empty(), &detail);
}

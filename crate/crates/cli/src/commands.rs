//! Execution of resolved commands. Each command renders a text summary,
//! writes its files when given an output directory, and reports whether its
//! verdicts passed.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use wged::censoring::CensoredSample;
use wged::estimators::{estimate_all, Estimator, MethodSet, Target};
use wged::montecarlo::{run_simulation, verify_orderings};
use wged::report::{
    render_estimate_table, write_figure_csv, write_mse_csv, write_orderings_csv, EstimateReport,
};

use crate::error::{CliError, CliResult};
use crate::manifest::{EstimateRun, LossChoice, RunManifest, RunSpec, SimulateRun, Suite, VerifyRun};
use crate::suites;

/// What a command produced.
#[derive(Debug)]
pub struct Executed {
    pub stdout: String,
    /// File names written into the output directory.
    pub outputs: Vec<String>,
    /// `Err` carries a one-line description of the failed verdicts.
    pub verdict: Result<(), String>,
}

/// Runs `run`, writes its outputs and manifest into `out` (if any), and maps
/// failed verdicts to [`CliError::Verification`] after everything is written.
pub fn run_and_record(run: &RunSpec, out: Option<&Path>, workers: usize) -> CliResult<()> {
    let start = Instant::now();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let done = execute(run, out, workers)?;
    if let Some(dir) = out {
        RunManifest::new(run.clone(), start.elapsed().as_secs_f64(), done.outputs.clone()).write(dir)?;
    }
    emit(&done.stdout)?;
    done.verdict.map_err(CliError::Verification)
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
pub fn emit(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

pub fn execute(run: &RunSpec, out: Option<&Path>, workers: usize) -> CliResult<Executed> {
    match run {
        RunSpec::Estimate(e) => estimate(e, out),
        RunSpec::Simulate(s) => simulate(s, out, workers),
        RunSpec::Verify(v) => verify(v, out),
    }
}

fn create(dir: &Path, name: &str) -> CliResult<(std::fs::File, PathBuf)> {
    let path = dir.join(name);
    let f = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    Ok((f, path))
}

fn write_file(dir: &Path, name: &str, text: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::io(path, e))
}

/// Applies the censoring plan to the data: a complete sample of length `n` is
/// censored by the plan, a sample of length `m` is taken as already observed.
pub fn censored_sample(times: &[f64], scheme: &wged::CensoringScheme) -> CliResult<CensoredSample<f64>> {
    if times.len() == scheme.n() {
        let mut sorted = times.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(CensoredSample::from_complete(&sorted, scheme)?)
    } else if times.len() == scheme.m() {
        Ok(CensoredSample::new(scheme.clone(), times.to_vec())?)
    } else {
        Err(CliError::Input(format!(
            "{} data points fit neither n = {} nor m = {} of scheme {}",
            times.len(),
            scheme.n(),
            scheme.m(),
            scheme
        )))
    }
}

pub fn estimate_reports(run: &EstimateRun) -> CliResult<Vec<EstimateReport>> {
    let mut settings = run.settings.clone();
    if let LossChoice::Linex(q) = run.loss {
        settings.loss_qs.alpha = q;
        settings.loss_qs.series = q;
        settings.loss_qs.parallel = q;
        settings.loss_qs.hazard = q;
    }
    let setup = settings.setup()?;
    let methods: MethodSet = run.methods.parse()?;
    let keep = |e: Estimator| match run.loss {
        LossChoice::All => true,
        LossChoice::SquaredOnly => !e.is_linex(),
        LossChoice::Linex(_) => e == Estimator::Mle || e.is_linex(),
    };
    let mut reports = Vec::new();
    for scheme in &run.schemes {
        let sample = censored_sample(&run.times, scheme)?;
        let summary = sample.summary(setup.known.lambda, setup.known.theta)?;
        let grid = estimate_all(&summary, &setup, methods).map_err(|e| e.context(format!("scheme {}", scheme)))?;
        let mut report = EstimateReport::new(scheme, &summary, &setup, &grid);
        report.estimates.retain(|e| keep(e.estimator));
        reports.push(report);
    }
    Ok(reports)
}

fn estimate(run: &EstimateRun, out: Option<&Path>) -> CliResult<Executed> {
    let reports = estimate_reports(run)?;
    let mut text = String::new();
    for r in &reports {
        writeln!(text, "{}: m = {}, S_m = {:.10}", r.scheme, r.m, r.s_m).unwrap();
    }
    text.push('\n');
    text.push_str(&render_estimate_table(&reports));
    let mut outputs = Vec::new();
    if let Some(dir) = out {
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
        write_file(dir, "estimates.json", &json)?;
        write_file(dir, "estimates.txt", &text)?;
        outputs = vec!["estimates.json".into(), "estimates.txt".into()];
    }
    Ok(Executed {
        stdout: text,
        outputs,
        verdict: Ok(()),
    })
}

/// Figure files, one per target.
pub const FIGURES: [(&str, Target); 4] = [
    ("fig1.csv", Target::Alpha),
    ("fig2.csv", Target::Series),
    ("fig3.csv", Target::Parallel),
    ("fig4.csv", Target::Hazard),
];

fn simulate(run: &SimulateRun, out: Option<&Path>, workers: usize) -> CliResult<Executed> {
    let table = run_simulation(&run.config, workers)?;
    let orderings = verify_orderings(&table);
    let mut outputs = Vec::new();
    if let Some(dir) = out {
        let (f, _) = create(dir, "mse_table.csv")?;
        write_mse_csv(&table, f)?;
        let (f, _) = create(dir, "ordering_verdicts.csv")?;
        write_orderings_csv(&orderings, f)?;
        outputs.push("mse_table.csv".to_string());
        outputs.push("ordering_verdicts.csv".to_string());
        for (name, target) in FIGURES {
            let (f, _) = create(dir, name)?;
            write_figure_csv(&table, target, f)?;
            outputs.push(name.to_string());
        }
    }
    let mut text = String::new();
    let links_ok = orderings.links.iter().filter(|l| l.holds).count();
    let mono_ok = orderings.monotone.iter().filter(|m| m.holds).count();
    writeln!(
        text,
        "{} replications x {} schemes; ordering links hold {}/{}; decrease in n holds {}/{}",
        table.replications,
        run.config.schemes.len(),
        links_ok,
        orderings.links.len(),
        mono_ok,
        orderings.monotone.len()
    )
    .unwrap();
    for l in orderings.links.iter().filter(|l| !l.holds) {
        writeln!(
            text,
            "  link fails: {} {} {}: MSE({}) = {:.6e} >= MSE({}) = {:.6e}",
            l.scheme, l.target, l.chain, l.lhs, l.lhs_mse, l.rhs, l.rhs_mse
        )
        .unwrap();
    }
    for m in orderings.monotone.iter().filter(|m| !m.holds) {
        writeln!(
            text,
            "  no decrease: {} {}: {} -> {}: {:.6e} -> {:.6e}",
            m.target, m.estimator, m.smaller, m.larger, m.smaller_mse, m.larger_mse
        )
        .unwrap();
    }
    // Ordering verdicts are findings about the estimators, not failures of the run.
    Ok(Executed {
        stdout: text,
        outputs,
        verdict: Ok(()),
    })
}

fn verify(run: &VerifyRun, out: Option<&Path>) -> CliResult<Executed> {
    let mut text = String::new();
    let (json, verdict) = match run.suite {
        Suite::Table2 => {
            let cells = suites::golden_cells()?;
            let failed: Vec<_> = cells.iter().filter(|c| !c.pass).collect();
            writeln!(text, "table2: {}/{} cells within tolerance", cells.len() - failed.len(), cells.len()).unwrap();
            for c in &failed {
                writeln!(
                    text,
                    "  {} {} {}: published {} computed {:.7} |err| {:.2e} > {:.0e}",
                    c.scheme, c.target, c.estimator, c.published, c.computed, c.abs_err, c.tolerance
                )
                .unwrap();
            }
            let verdict = if failed.is_empty() {
                Ok(())
            } else {
                Err(format!("{} of {} table cells out of tolerance", failed.len(), cells.len()))
            };
            (serde_json::to_string_pretty(&cells), verdict)
        }
        Suite::Theorems => {
            let o = suites::theorems(run.trials, run.seed)?;
            writeln!(text, "theorems: {} random configurations, seed {}", o.trials, o.seed).unwrap();
            for t in &o.tallies {
                writeln!(
                    text,
                    "  {:<8} ordering failures {} ({} unresolved), spacing failures {}, contraction {}/{} in range (ratios {:.1}..{:.1})",
                    t.name,
                    t.ordering_failures,
                    t.unresolved,
                    t.spacing_failures,
                    t.contraction_trials - t.contraction_failures,
                    t.contraction_trials,
                    t.contraction_min,
                    t.contraction_max
                )
                .unwrap();
            }
            for c in &o.counterexamples {
                writeln!(text, "  {}", c).unwrap();
            }
            let verdict = if o.pass() {
                Ok(())
            } else {
                Err("theorem property checks failed".to_string())
            };
            (serde_json::to_string_pretty(&o), verdict)
        }
        Suite::Oracles => {
            let o = suites::oracles(run.trials, run.seed)?;
            writeln!(text, "oracles: {} checks on {} configurations, seed {}", o.checks, o.trials, o.seed).unwrap();
            for (name, w) in &o.worst {
                writeln!(text, "  {:<10} worst relative error {:.2e}", name, w).unwrap();
            }
            for (ctx, c) in &o.failures {
                writeln!(text, "  {} {}: {:.3e} > {:.0e}", ctx, c.name, c.rel_err, c.tolerance).unwrap();
            }
            let verdict = if o.pass() {
                Ok(())
            } else {
                Err(format!("{} oracle comparisons out of tolerance", o.failures.len()))
            };
            (serde_json::to_string_pretty(&o), verdict)
        }
    };
    let mut outputs = Vec::new();
    if let Some(dir) = out {
        let name = format!("verify_{}.json", run.suite);
        write_file(dir, &name, &(json.expect("verdicts serialize") + "\n"))?;
        outputs.push(name);
    }
    Ok(Executed {
        stdout: text,
        outputs,
        verdict,
    })
}

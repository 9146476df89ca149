use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wged::censoring::parse_times;
use wged::electric;
use wged::montecarlo::SimConfig;
use wged::CensoringScheme;
use wged_cli::commands::run_and_record;
use wged_cli::config::{load_json, parse_list, read_text, EstimateConfig};
use wged_cli::manifest::{EstimateRun, LossChoice, RunManifest, RunSpec, SimulateRun, Suite, VerifyRun};
use wged_cli::{resolve_seed, CliError, CliResult};

#[derive(Parser)]
#[command(name = "wged", version, about = "MLE, Bayes and E-Bayes estimation for the WGED under progressive type-II censoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Electric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate alpha, system reliabilities and the hazard rate from data.
    Estimate {
        /// Failure times, one per line.
        #[arg(long, conflicts_with = "builtin")]
        data: Option<PathBuf>,
        /// Use an embedded dataset (with its analysis settings as defaults).
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Censoring plan such as "4,4,1,0*7"; repeat for several plans.
        #[arg(long)]
        scheme: Vec<String>,
        /// Sample size; defaults to m + sum(R).
        #[arg(long)]
        n: Option<usize>,
        /// JSON settings file (see configs/table1.json).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        /// Gamma prior "a,b".
        #[arg(long)]
        prior: Option<String>,
        /// Hyperprior "u,v,c".
        #[arg(long)]
        hyper: Option<String>,
        /// all, self or linex:q (one shape for every target).
        #[arg(long, default_value = "all")]
        loss: LossChoice,
        /// Mission time for both system reliabilities.
        #[arg(long)]
        t: Option<f64>,
        /// Component count for both systems.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        hazard_t: Option<f64>,
        /// all, mle, bayes, ebayes, ebayes1, ebayes2, ebayes3 (comma separated).
        #[arg(long, default_value = "all")]
        method: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Directory for estimates.json, estimates.txt and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo comparison of the estimators.
    Simulate {
        /// JSON simulation config (see configs/table3.json).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        reps: Option<usize>,
        /// Master seed; WGED_SEED takes precedence.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Draw (a, b, alpha) from the priors for every replication.
        #[arg(long)]
        redraw_truth: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite; exits 1 if any verdict fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Random configurations (theorems: 1000, oracles: 100 by default).
        #[arg(long)]
        trials: Option<usize>,
        /// WGED_SEED takes precedence.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the command recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Estimate {
            data,
            builtin,
            scheme,
            n,
            config,
            lambda,
            theta,
            prior,
            hyper,
            loss,
            t,
            k,
            hazard_t,
            method,
            format,
            out,
        } => {
            let (source, times) = match (&data, builtin) {
                (Some(path), None) => {
                    let times = parse_times(&read_text(path)?).map_err(|e| input(format!("{}: {}", path.display(), e)))?;
                    (path.display().to_string(), times)
                }
                (None, Some(Builtin::Electric)) => ("builtin:electric".to_string(), electric::FAILURE_TIMES.to_vec()),
                _ => return Err(input("give either --data PATH or --builtin electric")),
            };
            let texts: Vec<String> = if scheme.is_empty() {
                if builtin.is_none() {
                    return Err(input("--scheme is required with --data"));
                }
                electric::SCHEMES.iter().map(|s| s.to_string()).collect()
            } else {
                scheme
            };
            let schemes = texts
                .iter()
                .map(|s| match n {
                    Some(n) => CensoringScheme::parse(s, n),
                    None => CensoringScheme::parse_implied(s),
                })
                .collect::<Result<Vec<_>, _>>()?;

            let mut settings: EstimateConfig = match &config {
                Some(path) => load_json(path)?,
                None => EstimateConfig::default(),
            };
            if let Some(v) = lambda {
                settings.lambda = v;
            }
            if let Some(v) = theta {
                settings.theta = v;
            }
            if let Some(p) = prior {
                let [a, b] = parse_list("--prior", &p)?;
                settings.prior.a = a;
                settings.prior.b = b;
            }
            if let Some(h) = hyper {
                let [u, v, c] = parse_list("--hyper", &h)?;
                settings.hyper.u = u;
                settings.hyper.v = v;
                settings.hyper.c = c;
            }
            if let Some(t) = t {
                settings.targets.series.t = t;
                settings.targets.parallel.t = t;
            }
            if let Some(k) = k {
                settings.targets.series.k = k;
                settings.targets.parallel.k = k;
            }
            if let Some(h) = hazard_t {
                settings.targets.hazard_t = h;
            }
            let run = EstimateRun {
                source,
                times,
                schemes,
                settings,
                methods: method,
                loss,
            };
            if let Format::Json = format {
                let reports = wged_cli::commands::estimate_reports(&run)?;
                wged_cli::commands::emit(&(serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n"))?;
                if out.is_none() {
                    return Ok(());
                }
            }
            run_and_record(&RunSpec::Estimate(run), out.as_deref(), 0)
        }
        Command::Simulate {
            config,
            reps,
            seed,
            workers,
            redraw_truth,
            out,
        } => {
            let mut cfg: SimConfig = load_json(&config)?;
            if let Some(r) = reps {
                cfg.replications = r;
            }
            cfg.master_seed = resolve_seed(seed.unwrap_or(cfg.master_seed))?;
            cfg.redraw_truth |= redraw_truth;
            cfg.validate()?;
            run_and_record(&RunSpec::Simulate(SimulateRun { config: cfg, workers }), Some(&out), workers)
        }
        Command::Verify {
            suite,
            trials,
            seed,
            out,
        } => {
            let trials = trials.unwrap_or(match suite {
                Suite::Theorems => 1000,
                Suite::Oracles => 100,
                Suite::Table2 => 1,
            });
            let run = VerifyRun {
                suite,
                trials,
                seed: resolve_seed(seed)?,
            };
            run_and_record(&RunSpec::Verify(run), out.as_deref(), 0)
        }
        Command::Replay {
            manifest,
            out,
            workers,
        } => {
            let m: RunManifest = load_json(&manifest)?;
            run_and_record(&m.run, Some(&out), workers)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wged: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

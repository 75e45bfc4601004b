use std::path::PathBuf;
use std::process::ExitCode;

use adfcs::alpha::AlphaMethod;
use adfcs::depth::{calibrate_formula_constant, recommend_depth_formula, recommend_depth_search};
use adfcs::error::Error;
use adfcs::experiments::{
    kitaev_defaults, run_alpha_curves, run_alpha_table, run_error_sweep, run_estimate, run_kitaev, run_validation,
    ExperimentConfig, ExperimentOutput, StateSource,
};
use adfcs::shadow::Aggregator;
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "adfcs", version, about = "Adaptive-depth fermionic classical shadows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all experiments. Precedence: built-in defaults, then
/// `--config`, then `--set`, then the dedicated flags.
#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated depths; `fcs` stands for the saturation depth.
    #[arg(long)]
    depth: Option<String>,
    /// Comma-separated, strictly increasing shot counts.
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_parser = ["dense", "gaussian"])]
    backend: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<String>,
    /// Observable: index list such as `2 3 4 17`, or `kitaev mu=2 delta=1 t=0.4`. Repeatable.
    #[arg(long = "observable")]
    observables: Vec<String>,
    /// Extra `key=value` assignment. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl Common {
    fn resolve(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, Error> {
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for pair in &self.sets {
            cfg.set_pair(pair)?;
        }
        let flags = [
            ("n", &self.n),
            ("depths", &self.depth),
            ("shots", &self.shots),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("backend", &self.backend),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if !self.observables.is_empty() {
            cfg.set("observables", &self.observables.join(";"))?;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Formula,
    Search,
}

#[derive(Subcommand)]
enum Command {
    /// Shadow-channel eigenvalues `n,d,S,method,alpha,stderr` (alpha.csv).
    Alpha {
        /// exact_dp, monte_carlo, pn_exact, slrw_sum, slrw_poisson, k_product or fcs_limit. Repeatable.
        #[arg(long = "method", default_value = "exact_dp")]
        methods: Vec<String>,
        /// Circuits per Monte-Carlo estimate.
        #[arg(long)]
        trials: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Recommended depth for the configured observables, as JSON on stdout.
    Depth {
        #[arg(long, value_enum, default_value = "search")]
        mode: Mode,
        #[arg(long)]
        eta: Option<String>,
        /// Calibration constant of the formula.
        #[arg(long)]
        c: Option<String>,
        /// Interaction distance for the formula; taken from the observables when absent.
        #[arg(long)]
        d_int: Option<usize>,
        /// Compare formula and search on a grid of sizes and distances instead.
        #[arg(long)]
        calibrate: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Shadow estimates of the configured observables (estimate.csv).
    Estimate {
        /// `random`, `vacuum`, or a path to dense amplitudes.
        #[arg(long, default_value = "random")]
        state: String,
        /// Use the median of this many batch means instead of the plain mean.
        #[arg(long)]
        median_of_means: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// RMSE against shots for every string and depth (error_sweep.csv).
    SweepError {
        #[command(flatten)]
        common: Common,
    },
    /// Kitaev chain energy at a shallow and a saturating depth (kitaev.csv, kitaev_summary.json).
    Kitaev {
        #[command(flatten)]
        common: Common,
    },
    /// Exact, product and walk eigenvalues against depth (alpha_curves.csv).
    AlphaCurves {
        #[command(flatten)]
        common: Common,
    },
    /// Cross-engine consistency checks (validation.json); exit code 3 on failure.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Config(Error),
    Runtime(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse { .. } => Failure::Config(e),
            other => Failure::Runtime(other),
        }
    }
}

fn write(out: &ExperimentOutput, cfg: &ExperimentConfig) -> Result<(), Failure> {
    for p in out.write_to(&cfg.out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn config_error(msg: String) -> Failure {
    Failure::Config(Error::Config(msg))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Alpha { methods, trials, common } => {
            let mut cfg = common.resolve(ExperimentConfig::default())?;
            if let Some(t) = trials {
                cfg.set("trials", &t)?;
            }
            let methods = methods
                .iter()
                .map(|m| m.parse::<AlphaMethod>().map_err(|e| config_error(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            write(&run_alpha_table(&cfg, &methods)?, &cfg)
        }
        Command::Depth { mode, eta, c, d_int, calibrate, common } => {
            let mut cfg = common.resolve(ExperimentConfig::default())?;
            if let Some(v) = eta {
                cfg.set("eta", &v)?;
            }
            if let Some(v) = c {
                cfg.set("c", &v)?;
            }
            cfg.validate()?;
            let json = if calibrate {
                let d_ints: Vec<usize> = (1..=8).collect();
                let cal = calibrate_formula_constant(&[8, 10, 12], &d_ints, cfg.constant, cfg.eta)?;
                serde_json::to_string_pretty(&cal).expect("calibration serializes")
            } else {
                let terms = cfg.index_sets()?;
                match mode {
                    Mode::Search => recommend_depth_search(cfg.n, &terms, cfg.eta)?.to_json(),
                    Mode::Formula => {
                        let d = match d_int {
                            Some(d) => d,
                            None => terms
                                .iter()
                                .map(|s| s.interaction_distance())
                                .max()
                                .ok_or_else(|| config_error("formula mode needs --d-int or an observable".into()))?,
                        };
                        recommend_depth_formula(cfg.n, d, cfg.constant, true)?.to_json()
                    }
                }
            };
            println!("{json}");
            Ok(())
        }
        Command::Estimate { state, median_of_means, common } => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            let source = match state.as_str() {
                "random" => StateSource::Random,
                "vacuum" => StateSource::Vacuum,
                path => StateSource::File(path.into()),
            };
            let agg = match median_of_means {
                Some(0) => return Err(config_error("median-of-means needs at least one batch".into())),
                Some(batches) => Aggregator::MedianOfMeans { batches },
                None => Aggregator::Mean,
            };
            write(&run_estimate(&cfg, &source, agg)?, &cfg)
        }
        Command::SweepError { common } => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            write(&run_error_sweep(&cfg)?, &cfg)
        }
        Command::Kitaev { common } => {
            let cfg = common.resolve(kitaev_defaults())?;
            let out = run_kitaev(&cfg)?;
            write(&out, &cfg)?;
            if let Some(s) = out.get("kitaev_summary.json") {
                print!("{s}");
            }
            Ok(())
        }
        Command::AlphaCurves { common } => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            write(&run_alpha_curves(&cfg)?, &cfg)
        }
        Command::Validate { common } => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            let (report, out) = run_validation(cfg.seed)?;
            for c in &report.checks {
                let status = if c.passed { "ok" } else if c.gating { "FAIL" } else { "fail (non-gating)" };
                println!("{status:<18} {:<34} measured {:.3e}  tolerance {:.1e}", c.name, c.measured, c.tolerance);
            }
            write(&out, &cfg)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Validation)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("adfcs: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Validation) => {
            eprintln!("adfcs: validation failed");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("adfcs: {e}");
            ExitCode::FAILURE
        }
    }
}

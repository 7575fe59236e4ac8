//! `mixlit`: experiments on mixed Littlewood-type approximation.
//!
//! Exit status: 0 on success, 1 when a verification suite fails, 2 for
//! configuration errors, 3 when a memory or scan budget is exceeded.

mod commands;
mod config;
mod error;
mod output;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixlit::Budget;
use serde::de::DeserializeOwned;

use config::{ExperimentConfig, Format};
use error::CliError;
use verify::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "mixlit",
    version,
    about = "Mixed Littlewood experiments: pseudo-norms, criteria series, E_n measures"
)]
struct Cli {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Memory ceiling for sieves and block sweeps.
    #[arg(long, global = true, value_name = "MB")]
    budget_mem: Option<u64>,
    /// Sequence spec, e.g. '{"rule":"prime_power","p":2}'; repeat for a family.
    #[arg(long = "sequence", global = true, value_name = "JSON")]
    sequences: Vec<String>,
    /// ψ spec, e.g. '{"family":"power_log","c":"1","a":"2","b":"0"}'.
    #[arg(long, global = true, value_name = "JSON")]
    psi: Option<String>,
    /// Weight spec, e.g. '{"kind":"log_power","k":2}'; repeatable.
    #[arg(long = "weight", global = true, value_name = "JSON")]
    weights: Vec<String>,
    /// Target spec, e.g. '{"kind":"rational","value":"3/7"}'; repeatable.
    #[arg(long = "alpha", global = true, value_name = "JSON")]
    alphas: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pseudo-norm, 𝓜 and 𝔐 of n for each configured sequence.
    Norm {
        #[arg(long)]
        n: Option<u64>,
    },
    /// Partial sums of ψ(n)·w(n) over N0..=N1 with the analytic verdict.
    Series {
        #[arg(long)]
        n0: Option<u64>,
        #[arg(long)]
        n1: Option<u64>,
    },
    /// Finite-range measurements of the hypotheses on a family.
    Criteria {
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Coprime solutions of ∏|n|·|nα − p| <= ψ(n).
    Solutions {
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Running minimum of n𝔐(n)(log n)^{1+ε}|n|_D‖nα‖′.
    Liminf {
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        scan_cap: Option<u64>,
    },
    /// Exact measure of ⋃ E_n over N0..=N1, optionally with Monte Carlo.
    Measure {
        #[arg(long)]
        n0: Option<u64>,
        #[arg(long)]
        n1: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Built-in identity and oracle suites; exits 1 if any fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Summary table over CSV files written by earlier runs.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn parse_json<T: DeserializeOwned>(flag: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("--{flag} {text}: {e}")))
}

fn set<T>(field: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *field = flag;
    }
}

/// The config file, if any, with every flag applied on top.
fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut c = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    set(&mut c.seed, cli.seed);
    set(&mut c.out, cli.out.clone());
    set(&mut c.format, cli.format);
    set(&mut c.budget_mem, cli.budget_mem);
    if !cli.sequences.is_empty() {
        c.sequences = cli
            .sequences
            .iter()
            .map(|s| parse_json("sequence", s))
            .collect::<Result<_, _>>()?;
    }
    if let Some(psi) = &cli.psi {
        c.psi = Some(parse_json("psi", psi)?);
    }
    if !cli.weights.is_empty() {
        c.weights = cli
            .weights
            .iter()
            .map(|s| parse_json("weight", s))
            .collect::<Result<_, _>>()?;
    }
    if !cli.alphas.is_empty() {
        c.alphas = cli
            .alphas
            .iter()
            .map(|s| parse_json("alpha", s))
            .collect::<Result<_, _>>()?;
    }
    match &cli.command {
        Command::Norm { n } => set(&mut c.n, *n),
        Command::Series { n0, n1 } | Command::Measure { n0, n1, .. } => {
            set(&mut c.n0, *n0);
            set(&mut c.n1, *n1);
        }
        Command::Criteria { n_max, k_max } => {
            set(&mut c.n_max, *n_max);
            set(&mut c.k_max, *k_max);
        }
        Command::Solutions { n_max } | Command::Verify { n_max, .. } => set(&mut c.n_max, *n_max),
        Command::Liminf {
            n_max,
            epsilon,
            scan_cap,
        } => {
            set(&mut c.n_max, *n_max);
            set(&mut c.epsilon, epsilon.clone());
            set(&mut c.scan_cap, *scan_cap);
        }
        Command::Report { .. } => {}
    }
    if let Command::Measure { samples, .. } = &cli.command {
        set(&mut c.samples, *samples);
    }
    Ok(c)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let config = effective_config(&cli)?;
    let budget = config.budget_mem.map_or_else(Budget::default, Budget::from_megabytes);
    match &cli.command {
        Command::Norm { .. } => commands::norm(&config),
        Command::Series { .. } => commands::series(&config, &budget),
        Command::Criteria { .. } => commands::criteria(&config),
        Command::Solutions { .. } => commands::solutions(&config),
        Command::Liminf { .. } => commands::liminf(&config),
        Command::Measure { .. } => commands::measure(&config),
        Command::Verify { suite, .. } => verify::run(&config, *suite, &budget),
        Command::Report { files } => report::run(&config, files),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mixlit: {e}");
            e.exit_code()
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use combilab::experiments::run;
use combilab::output::emit;
use combilab::parse::{parse_eps_grid, parse_vector};
use combilab::{Experiment, ExperimentConfig, Format, HarnessError, Mode, Result};

#[derive(Parser, Debug)]
#[command(
    name = "combilab",
    version,
    about = "Experiments on random 0/1 matrices with fixed row weight"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Print one sampled matrix, one record per row.
    Sample,
    /// Smallest singular values of sampled square matrices.
    Svmin,
    /// Singularity probability, exact (--mode exhaustive) or Monte Carlo.
    Singularity,
    /// P{s_n <= eps/sqrt(n)} over the epsilon grid.
    Tail,
    /// Distance from the last row to the span of the others.
    Distance,
    /// Combinatorial least common denominator of --v (or of --a with --v).
    Clcd,
    /// Small-ball probabilities of <eta, v> against the three-term bound.
    Smallball,
    /// Oracle checks and the inequality suite; exit status 3 on failure.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Montecarlo,
    Exhaustive,
}

#[derive(clap::Args, Debug)]
struct Opts {
    /// Matrix dimension.
    #[arg(long, global = true, default_value_t = 16)]
    n: usize,
    /// Row weight [default: n/2].
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Row count for rectangular matrices [default: n].
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Number of trials [default depends on the subcommand].
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file; summaries go to <stem>.summary.<ext> beside it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Epsilon grid as a:b:step or a comma list [default: 0:1:0.05].
    #[arg(long, global = true)]
    eps_grid: Option<String>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Largest theta examined by CLCD searches.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Comma-separated vector v.
    #[arg(long, global = true, allow_hyphen_values = true)]
    v: Option<String>,
    /// Comma-separated vector a (tensor CLCD).
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "montecarlo")]
    mode: ModeArg,
    /// Read the whole configuration from a JSON file; other flags are ignored.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn experiment(c: Command) -> Experiment {
    match c {
        Command::Sample => Experiment::Sample,
        Command::Svmin => Experiment::Svmin,
        Command::Singularity => Experiment::Singularity,
        Command::Tail => Experiment::Tail,
        Command::Distance => Experiment::Distance,
        Command::Clcd => Experiment::Clcd,
        Command::Smallball => Experiment::Smallball,
        Command::Verify => Experiment::Verify,
    }
}

fn default_trials(e: Experiment) -> u64 {
    match e {
        Experiment::Sample | Experiment::Clcd => 1,
        Experiment::Svmin => 100,
        Experiment::Tail | Experiment::Distance => 1000,
        Experiment::Singularity | Experiment::Verify => 10_000,
        Experiment::Smallball => 100_000,
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let exp = experiment(cli.command);
    let o = &cli.opts;
    if let Some(path) = &o.config {
        let mut cfg = ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?;
        cfg.experiment = exp;
        return Ok(cfg);
    }
    let mut cfg = ExperimentConfig::new(exp, o.n, o.trials.unwrap_or(default_trials(exp)), o.seed);
    cfg.d = o.d.unwrap_or(o.n / 2);
    cfg.m = o.m.unwrap_or(o.n);
    cfg.threads = o.threads;
    cfg.out = o.out.clone();
    cfg.format = match o.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    cfg.mode = match o.mode {
        ModeArg::Montecarlo => Mode::Montecarlo,
        ModeArg::Exhaustive => Mode::Exhaustive,
    };
    if let Some(g) = &o.eps_grid {
        cfg.eps_grid = parse_eps_grid(g)?;
    }
    let p = &mut cfg.params;
    for (slot, val) in [
        (&mut p.alpha, o.alpha),
        (&mut p.gamma, o.gamma),
        (&mut p.delta, o.delta),
        (&mut p.rho, o.rho),
        (&mut p.horizon, o.horizon),
    ] {
        if let Some(x) = val {
            *slot = x;
        }
    }
    cfg.v = o.v.as_deref().map(parse_vector).transpose()?;
    cfg.a = o.a.as_deref().map(parse_vector).transpose()?;
    // clcd takes its dimension from the vector
    if exp == Experiment::Clcd {
        if let Some(v) = &cfg.v {
            cfg.n = v.len();
            cfg.d = o.d.unwrap_or(cfg.n / 2);
            cfg.m = o.m.unwrap_or(cfg.n);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = build_config(cli)?;
    let out = run(&cfg)?;
    let verify = cfg.experiment == Experiment::Verify;
    if !verify || cfg.out.is_some() {
        emit(&out)?;
    }
    for c in &out.checks {
        if verify {
            println!("{}", c.line());
        } else {
            eprintln!("{}", c.line());
        }
    }
    Ok(!verify || out.all_passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("combilab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &HarnessError) -> u8 {
    e.exit_code() as u8
}

//! `rprun`: batch experiments on Ramanujan primes and their coin model.
//!
//! Every table starts with a comment header (`#` lines in CSV, a `meta`
//! object in JSON) echoing the version, the seed and the effective config.
//! Options can also come from a `key=value` file passed with `--config`;
//! flags win over the file, the file wins over the defaults.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rprun_core::RpParams;

use crate::config::{Guard, Settings};
use crate::error::CliError;
use crate::output::{emit, Format, Header};

#[derive(Parser, Debug)]
#[command(
    name = "rprun",
    version,
    about = "Ramanujan primes, the head-coloring coin model and its Poisson analogue"
)]
struct Cli {
    /// Worker threads; 0 uses every core [default: 0]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// `key=value` file with option defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file, or directory for commands writing several tables [default: stdout]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed [default: 1]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Omit the timestamp so reruns are byte-identical
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sieve primes and report counts
    Sieve(SieveArgs),
    /// Ramanujan primes and the classification of primes up to a limit
    Rp(RpArgs),
    /// Toss coins and color the heads
    Coins(CoinsArgs),
    /// Event streams from Poisson processes and synthetic primes
    Poisson(PoissonArgs),
    /// Run-length report and first occurrences of runs for a stream
    Runs(RunsArgs),
    /// First occurrence of a run of length k, one row per trial
    FirstRun(FirstRunArgs),
    /// Closed-form predictions of the coin model
    Predict(PredictArgs),
    /// Primes against the coin model, a fair coin and the predictions
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct SieveArgs {
    /// Sieve bound [default: 1000000]
    #[arg(long)]
    pub limit: Option<u64>,
    /// Segment length in integers, a multiple of 128 [default: 524288]
    #[arg(long)]
    pub segment_size: Option<u64>,
    /// Cache file; reused when it holds the same limit, rewritten otherwise
    #[arg(long)]
    pub cache: Option<String>,
    /// Also write every prime
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug)]
pub struct RpArgs {
    /// Classify primes up to this bound [default: 1000]
    #[arg(long)]
    pub limit: Option<u64>,
    /// Ratio c of the c-Ramanujan primes, `a/b` or a decimal [default: 1/2]
    #[arg(long)]
    pub c: Option<RpParams>,
    /// Sieve this many times past the limit [default: 4]
    #[arg(long)]
    pub guard_factor: Option<u64>,
}

#[derive(Args, Debug)]
pub struct CoinsArgs {
    /// Tosses per trial [default: 10000]
    #[arg(long)]
    pub n: Option<usize>,
    /// Head probability, `a/b` or a decimal [default: 2/3]
    #[arg(long)]
    pub p: Option<Prob>,
    /// Censoring guard, or `none` to color relative to the last toss [default: none]
    #[arg(long)]
    pub guard: Option<Guard>,
    /// Number of trials [default: 1]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Also write the toss-by-toss transcript of trial 0
    #[arg(long)]
    pub transcript: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoissonMode {
    /// Two independent Poisson processes merged by time
    Dual,
    /// Synthetic primes with intensity 1/ln x
    Synthetic,
    /// Independent prime searches from x0 and x0/2
    Paired,
    /// One synthetic stream seen from x0 and from x0/2
    Coupled,
}

#[derive(Args, Debug)]
pub struct PoissonArgs {
    /// Which stream to generate [default: dual]
    #[arg(long, value_enum)]
    pub mode: Option<PoissonMode>,
    /// Intensity ratio of the head process (dual) [default: 2]
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Intensity of the tail process (dual) [default: 1]
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Time horizon (dual) [default: 1000]
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Starting point (synthetic, paired, coupled) [default: 1000000]
    #[arg(long)]
    pub x0: Option<f64>,
    /// Number of points or events (synthetic, paired) [default: 1000]
    #[arg(long)]
    pub length: Option<usize>,
    /// End point (coupled) [default: 2000000]
    #[arg(long)]
    pub x_end: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    /// Ramanujan (red) and other (blue) primes
    Primes,
    /// Colored heads of the coin model
    Coins,
    /// Colored heads of independent synthetic prime searches
    Poisson,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    /// Stream to analyse [default: primes]
    #[arg(long, value_enum)]
    pub source: Option<Source>,
    /// Classify primes up to this bound (primes) [default: 1000000]
    #[arg(long)]
    pub limit: Option<u64>,
    /// Ratio c of the c-Ramanujan primes (primes) [default: 1/2]
    #[arg(long)]
    pub c: Option<RpParams>,
    /// Tosses or events per trial (coins, poisson) [default: 65536]
    #[arg(long)]
    pub n: Option<usize>,
    /// Head probability (coins) [default: 2/3]
    #[arg(long)]
    pub p: Option<Prob>,
    /// Censoring guard or `none` (coins, poisson) [default: 3]
    #[arg(long)]
    pub guard: Option<Guard>,
    /// Number of trials (coins, poisson) [default: 200]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Start of the searches (poisson) [default: 1e12]
    #[arg(long)]
    pub x0: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RunsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Smallest run length reported [default: 1]
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Largest run length reported [default: 20]
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelArg {
    Red,
    Blue,
}

#[derive(Args, Debug)]
pub struct FirstRunArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Run length [default: 10]
    #[arg(long)]
    pub k: Option<usize>,
    /// Run label [default: blue]
    #[arg(long, value_enum)]
    pub label: Option<LabelArg>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Head probability [default: 2/3]
    #[arg(long)]
    pub p: Option<Prob>,
    /// Number of heads; exact enumeration is added when it is at most 24 [default: 1000000]
    #[arg(long)]
    pub n: Option<f64>,
    /// Smallest run length [default: 1]
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Largest run length [default: 10]
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Smallest run length [default: 1]
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Largest run length [default: 12]
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Coin-model trials [default: 200]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Classify primes up to this bound [default: 1000000]
    #[arg(long)]
    pub limit: Option<u64>,
    /// Tosses per coin-model trial [default: 65536]
    #[arg(long)]
    pub n: Option<usize>,
    /// Ratio c; the coin model uses p = 1/(1+c) [default: 1/2]
    #[arg(long)]
    pub c: Option<RpParams>,
    /// Censoring guard of the coin model, or `none` [default: 3]
    #[arg(long)]
    pub guard: Option<Guard>,
}

/// A probability written as `a/b` or a decimal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prob(pub f64);

impl std::str::FromStr for Prob {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected a probability such as 2/3 or 0.75, got {s}");
        let v = match s.split_once('/') {
            Some((a, b)) => {
                let (a, b): (f64, f64) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                a / b
            }
            None => s.trim().parse().map_err(|_| bad())?,
        };
        if (0.0..=1.0).contains(&v) {
            Ok(Prob(v))
        } else {
            Err(bad())
        }
    }
}

impl std::fmt::Display for Prob {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Options shared by every command.
pub struct Ctx {
    pub seed: u64,
    pub deterministic: bool,
}

impl Ctx {
    pub fn header(&self, command: &'static str, settings: Settings) -> Result<Header, CliError> {
        Ok(Header::new(
            command,
            self.seed,
            settings.finish()?,
            self.deterministic,
        ))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut s = Settings::load(cli.config.as_deref())?;
    let threads = s.get("threads", cli.threads, 0usize)?;
    let seed = s.get("seed", cli.seed, 1u64)?;
    let deterministic = s.get_flag("deterministic", cli.deterministic)?;
    let format = s.get_enum("format", cli.format, Format::Csv)?;
    let out = s.get(
        "out",
        cli.out.map(|p| p.to_string_lossy().into_owned()),
        String::new(),
    )?;
    let out = (!out.is_empty()).then(|| PathBuf::from(out));
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Resource(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx {
        seed,
        deterministic,
    };
    let (header, tables) = match cli.command {
        Command::Sieve(a) => commands::sieve(a, s, &ctx)?,
        Command::Rp(a) => commands::rp(a, s, &ctx)?,
        Command::Coins(a) => commands::coins(a, s, &ctx)?,
        Command::Poisson(a) => commands::poisson(a, s, &ctx)?,
        Command::Runs(a) => commands::runs(a, s, &ctx)?,
        Command::FirstRun(a) => commands::first_run(a, s, &ctx)?,
        Command::Predict(a) => commands::predict(a, s, &ctx)?,
        Command::Compare(a) => commands::compare(a, s, &ctx)?,
    };
    emit(&header, &tables, format, out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rprun: error: {e}");
            e.exit_code()
        }
    }
}

//! `kitaev-echo`: batch driver for Loschmidt echoes and magnon momentum
//! distributions of the kicked/constant-field Kitaev chain.
//!
//! Exit status: 0 success, 1 validation error, 2 verification failure,
//! 3 I/O error.

mod commands;
mod config;
mod output;

use clap::error::ErrorKind;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Verification(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid configuration:\n{m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<kitaev_chain::ChainError> for CliError {
    fn from(e: kitaev_chain::ChainError) -> Self {
        CliError::Validation(format!("  - {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Flags shared by every subcommand. Each one can also come from the
/// environment (`KITAEV_ECHO_*`) or, below that, from `--config`.
#[derive(Args, Debug, Clone)]
pub struct CoreArgs {
    /// Chain length N (divisible by 4, at least 8)
    #[arg(long, env = "KITAEV_ECHO_N")]
    pub n: Option<usize>,

    /// Coupling ratio r = j_y / j_x
    #[arg(
        long,
        default_value_t = 1.0,
        env = "KITAEV_ECHO_R",
        allow_hyphen_values = true
    )]
    pub r: f64,

    /// Energy unit j_x
    #[arg(
        long,
        default_value_t = 1.0,
        env = "KITAEV_ECHO_JX",
        allow_hyphen_values = true
    )]
    pub jx: f64,

    /// Output CSV path; stdout when omitted
    #[arg(long, env = "KITAEV_ECHO_OUT")]
    pub out: Option<PathBuf>,

    /// Write a companion gnuplot script here (requires --out)
    #[arg(long, env = "KITAEV_ECHO_PLOT_SCRIPT")]
    pub plot_script: Option<PathBuf>,

    /// Worker threads for the parallel sweeps; 0 means all cores
    #[arg(long, default_value_t = 0, env = "KITAEV_ECHO_WORKERS")]
    pub workers: usize,

    /// Flat `key = value` configuration file; explicit flags and
    /// environment variables override it
    #[arg(long, env = "KITAEV_ECHO_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EchoArgs {
    #[command(flatten)]
    pub core: CoreArgs,
    /// Forward-evolution field h_f (units of j_x)
    #[arg(
        long,
        default_value_t = 1.0,
        env = "KITAEV_ECHO_HF",
        allow_hyphen_values = true
    )]
    pub hf: f64,
    /// Backward-evolution field h_b
    #[arg(long, default_value_t = -1.0, env = "KITAEV_ECHO_HB", allow_hyphen_values = true)]
    pub hb: f64,
    /// Initial state: vacuum | magnon:M (mode index or momentum) | uniform
    #[arg(long, default_value = "vacuum", env = "KITAEV_ECHO_STATE")]
    pub state: String,
    /// Final time (units 1/j_x)
    #[arg(
        long,
        default_value_t = 50.0,
        env = "KITAEV_ECHO_TMAX",
        allow_hyphen_values = true
    )]
    pub tmax: f64,
    /// Grid spacing
    #[arg(
        long,
        default_value_t = 0.01,
        env = "KITAEV_ECHO_DT",
        allow_hyphen_values = true
    )]
    pub dt: f64,
    /// Sliding-window average length, in samples
    #[arg(long, env = "KITAEV_ECHO_WINDOW")]
    pub window: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct MomdistArgs {
    #[command(flatten)]
    pub core: CoreArgs,
    #[arg(
        long,
        default_value_t = 1.0,
        env = "KITAEV_ECHO_HF",
        allow_hyphen_values = true
    )]
    pub hf: f64,
    #[arg(long, default_value_t = -1.0, env = "KITAEV_ECHO_HB", allow_hyphen_values = true)]
    pub hb: f64,
    /// Initial state: magnon:M (mode index or momentum) | uniform
    #[arg(long, default_value = "uniform", env = "KITAEV_ECHO_STATE")]
    pub state: String,
    /// Fixed evolution time: scan P(k) over momenta at this t
    #[arg(long, env = "KITAEV_ECHO_TIME", allow_hyphen_values = true)]
    pub time: Option<f64>,
    /// k selector: "lo:hi" momentum window for k-scans, or one momentum
    /// (e.g. "1.2", "15pi/32") for a time scan at fixed k
    #[arg(long, env = "KITAEV_ECHO_K_RANGE")]
    pub k_range: Option<String>,
    /// Final time for time scans
    #[arg(
        long,
        default_value_t = 50.0,
        env = "KITAEV_ECHO_TMAX",
        allow_hyphen_values = true
    )]
    pub tmax: f64,
    #[arg(
        long,
        default_value_t = 0.01,
        env = "KITAEV_ECHO_DT",
        allow_hyphen_values = true
    )]
    pub dt: f64,
    /// Sliding-window average length for time scans, in samples
    #[arg(long, env = "KITAEV_ECHO_WINDOW")]
    pub window: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub core: CoreArgs,
    /// Forward field range "lo:hi:step" (or a single value)
    #[arg(
        long,
        default_value = "-2:2:0.02",
        env = "KITAEV_ECHO_HF",
        allow_hyphen_values = true
    )]
    pub hf: String,
    /// Fixed backward field
    #[arg(long, default_value_t = -1.0, env = "KITAEV_ECHO_HB", allow_hyphen_values = true)]
    pub hb: f64,
    #[arg(long, default_value = "vacuum", env = "KITAEV_ECHO_STATE")]
    pub state: String,
    /// Evaluation time
    #[arg(long, default_value_t = 1.2, env = "KITAEV_ECHO_TIME")]
    pub time: f64,
    /// Chain lengths (long format, one block per N); defaults to --n
    #[arg(long, value_delimiter = ',', env = "KITAEV_ECHO_SIZES")]
    pub sizes: Option<Vec<usize>>,
}

#[derive(Args, Debug, Clone)]
pub struct KickedArgs {
    #[command(flatten)]
    pub core: CoreArgs,
    /// Forward kick field
    #[arg(
        long,
        default_value_t = 1.0,
        env = "KITAEV_ECHO_HF",
        allow_hyphen_values = true
    )]
    pub hf: f64,
    /// Backward kick field
    #[arg(long, default_value_t = -1.0, env = "KITAEV_ECHO_HB", allow_hyphen_values = true)]
    pub hb: f64,
    /// Kick period tau (units 1/j_x); accepts "pi/4" style values
    #[arg(long, env = "KITAEV_ECHO_TAU")]
    pub tau: Option<String>,
    /// Number of kicks
    #[arg(long, default_value_t = 500, env = "KITAEV_ECHO_KICKS")]
    pub kicks: usize,
    #[arg(long, default_value = "vacuum", env = "KITAEV_ECHO_STATE")]
    pub state: String,
    /// Sliding-window average length, in kicks
    #[arg(long, env = "KITAEV_ECHO_WINDOW")]
    pub window: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub core: CoreArgs,
    #[arg(
        long,
        default_value_t = 1.0,
        env = "KITAEV_ECHO_HF",
        allow_hyphen_values = true
    )]
    pub hf: f64,
    #[arg(long, default_value_t = -1.0, env = "KITAEV_ECHO_HB", allow_hyphen_values = true)]
    pub hb: f64,
    /// Chain lengths to scan (at least four)
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "32,64,96,128,192,256",
        env = "KITAEV_ECHO_SIZES"
    )]
    pub sizes: Vec<usize>,
    /// Evaluation time
    #[arg(long, default_value_t = 1.2, env = "KITAEV_ECHO_TIME")]
    pub time: f64,
    /// Replace the measured peaks with an exact 2/N law (fit self-test)
    #[arg(long, hide = true)]
    pub synthetic_one_over_n: bool,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub core: CoreArgs,
    #[arg(
        long,
        default_value_t = 1.0,
        env = "KITAEV_ECHO_HF",
        allow_hyphen_values = true
    )]
    pub hf: f64,
    #[arg(long, default_value_t = -1.0, env = "KITAEV_ECHO_HB", allow_hyphen_values = true)]
    pub hb: f64,
    /// Horizon of the comparison grid
    #[arg(
        long,
        default_value_t = 2.0,
        env = "KITAEV_ECHO_TMAX",
        allow_hyphen_values = true
    )]
    pub tmax: f64,
    #[arg(
        long,
        default_value_t = 0.1,
        env = "KITAEV_ECHO_DT",
        allow_hyphen_values = true
    )]
    pub dt: f64,
    /// Deliberately corrupt the engine values (negative control)
    #[arg(long, hide = true)]
    pub corrupt: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Loschmidt echo L(t) under constant fields
    Echo(EchoArgs),
    /// Magnon momentum distribution P(k, t): k-scan at fixed t, or time
    /// scan at fixed k
    Momdist(MomdistArgs),
    /// L at fixed time as a function of the forward field
    Sweep(SweepArgs),
    /// Stroboscopic echo under the delta-kicked field
    Kicked(KickedArgs),
    /// Distribution peak height vs chain length, with a power-law fit
    Scaling(ScalingArgs),
    /// Compare the quartet engine against the brute-force oracle
    Verify(VerifyArgs),
}

#[derive(Parser, Debug)]
#[command(
    name = "kitaev-echo",
    version,
    about = "Loschmidt echo and magnon momentum distributions of the 1-D Kitaev chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kitaev-echo: {e}");
            match e {
                CliError::Validation(_) => ExitCode::from(1),
                CliError::Verification(_) => ExitCode::from(2),
                CliError::Io(_) => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: Cli, matches: &ArgMatches) -> CliResult<()> {
    let (name, sub) = match matches.subcommand() {
        Some(pair) => pair,
        None => return Err(CliError::Validation("  - missing subcommand".into())),
    };
    let _ = name;
    match cli.command {
        Command::Echo(mut args) => {
            config::apply_echo(&mut args, sub)?;
            init_workers(args.core.workers);
            commands::cmd_echo(&args)
        }
        Command::Momdist(mut args) => {
            config::apply_momdist(&mut args, sub)?;
            init_workers(args.core.workers);
            commands::cmd_momdist(&args)
        }
        Command::Sweep(mut args) => {
            config::apply_sweep(&mut args, sub)?;
            init_workers(args.core.workers);
            commands::cmd_sweep(&args)
        }
        Command::Kicked(mut args) => {
            config::apply_kicked(&mut args, sub)?;
            init_workers(args.core.workers);
            commands::cmd_kicked(&args)
        }
        Command::Scaling(mut args) => {
            config::apply_scaling(&mut args, sub)?;
            init_workers(args.core.workers);
            commands::cmd_scaling(&args)
        }
        Command::Verify(mut args) => {
            config::apply_verify(&mut args, sub)?;
            init_workers(args.core.workers);
            commands::cmd_verify(&args)
        }
    }
}

fn init_workers(workers: usize) {
    if workers > 0 {
        // ignore the error if a pool already exists (tests call run() twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
}

//! The `gmnl` command-line tool.
//!
//! [`run`] parses arguments, executes one library pipeline and writes a
//! report. Exit codes: 0 on success, 1 when the computation itself fails or a
//! verification criterion fails, 2 on malformed arguments.

mod commands;
mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use report::{csv_escape, Format, Report};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "GMNL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gmnl", version, about = "Genuine multipartite nonlocality from network-distributed entanglement")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Root seed for every random component.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Records)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a strategy pair in the L-fold Khot-Vishnoi game.
    Kv(KvArgs),
    /// Brute-force local bound of a bipartite game or its repetition.
    Localbound(LocalboundArgs),
    /// Network-extension game: biseparable bound, or score and GMNL test of a behavior.
    Netgame(NetgameArgs),
    /// Global min-cut of a network graph.
    Mincut(MincutArgs),
    /// Superactivation certificate for a network state.
    Certify(CertifyArgs),
    /// Flag-based distillation: coverage probability and copy count.
    Distill(DistillArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct KvArgs {
    /// Input length, a power of two between 2 and 64.
    #[arg(long)]
    pub n: u64,
    /// Number of parallel repetitions.
    #[arg(long = "L", default_value_t = 1)]
    pub l: u32,
    /// Noise bias; defaults to 1/2 - 1/log2(n).
    #[arg(long)]
    pub eta: Option<f64>,
    /// `maxweight`, `random`, `quantum` or a strategy file.
    #[arg(long, default_value = "maxweight")]
    pub strategy: String,
    /// Bob's strategy when it differs from Alice's.
    #[arg(long)]
    pub bob: Option<String>,
    /// Sum over every input instead of sampling.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug, Args)]
pub struct LocalboundArgs {
    /// `chsh` or a game CSV file.
    #[arg(long, default_value = "chsh")]
    pub game: String,
    /// Number of parallel copies.
    #[arg(long, default_value_t = 1)]
    pub reps: u32,
}

#[derive(Debug, Args)]
pub struct NetgameArgs {
    /// `chsh` or a game CSV file.
    #[arg(long, default_value = "chsh")]
    pub game: String,
    /// Graph file, or `triangle`, `star:M`, `complete:N`, `path:N`, `cycle:N`.
    #[arg(long)]
    pub graph: String,
    /// Behavior CSV to score and test.
    #[arg(long)]
    pub behavior: Option<PathBuf>,
    /// Biseparable threshold to use instead of the brute-force bound.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MincutArgs {
    #[arg(long)]
    pub graph: String,
    /// Exhaustive search returning the lexicographically first minimum cut.
    #[arg(long)]
    pub bruteforce: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Layout {
    /// Edge `e` holds subsystems `2e` and `2e+1`.
    EdgeMajor,
    /// Triangle only: subsystems grouped by party A, B, C.
    PartyMajor,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub graph: Option<String>,
    /// Binary state file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Layout::EdgeMajor)]
    pub layout: Layout,
    /// Per-link fidelities of a star network, comma separated, instead of a state.
    #[arg(long, value_delimiter = ',')]
    pub fractions: Vec<f64>,
    /// Local dimension for `--fractions`.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Search local unitaries on every link for a larger network fraction.
    #[arg(long)]
    pub optimize_fraction: bool,
    /// Add the copy-number diagnostic up to this many copies.
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    /// Number of links.
    #[arg(long, required_unless_present = "graph")]
    pub links: Option<u64>,
    /// Take the link count from this graph.
    #[arg(long)]
    pub graph: Option<String>,
    /// Copies of the network state consumed.
    #[arg(long)]
    pub copies: Option<u64>,
    /// Success probability to reach; reports the copies needed.
    #[arg(long)]
    pub target: Option<f64>,
    /// Simulated protocol runs; 0 skips the simulation.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed configuration; names the offending key.
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn usage(key: &str, msg: impl fmt::Display) -> Self {
        CliError::Usage(format!("{key}: {msg}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<gmnl::Error> for CliError {
    fn from(e: gmnl::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// What a subcommand produced: the report text and whether it succeeded.
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

/// Runs the tool with process-level I/O.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let written = match &cli.common.out {
                Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("--out {}: {e}", path.display())),
                None => out.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(err, "error: {msg}");
                return 1;
            }
            if outcome.success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

/// Runs the parsed command on a pool sized by [`THREADS_ENV`].
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(CliError::usage(THREADS_ENV, format!("expected a positive integer, got {v:?}"))),
        },
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Domain(format!("cannot start worker threads: {e}")))?;
    pool.install(|| commands::dispatch(cli))
}

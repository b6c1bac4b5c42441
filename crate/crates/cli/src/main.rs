use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use probe_compact::harness::OpMix;
use probe_compact::TableKind;

mod bench;
mod fuzz;
mod trace;

/// Open-addressing hash sets with compaction-based deletion: fuzzing,
/// trace replay and churn benchmarks.
#[derive(Debug, Parser)]
#[command(name = "probe-compact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run seeded differential workloads against both tables and a reference set.
    Fuzz(FuzzArgs),
    /// Replay a trace file against one table and print per-op results and probe statistics.
    Trace(TraceArgs),
    /// Run the insert/delete churn benchmark on both tables.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds to run.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 65_536)]
    pub capacity: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    /// Operations per seed.
    #[arg(long, default_value_t = 100_000)]
    pub ops: usize,
    /// Number of distinct keys, centred on zero [default: 2 * capacity].
    #[arg(long)]
    pub universe: Option<u64>,
    /// Check invariants after every N ops (0 = only compare return values).
    #[arg(long, default_value_t = 1)]
    pub check_every: usize,
    /// Add/contains/remove weights.
    #[arg(long, default_value = "45,35,20", value_parser = parse_mix)]
    pub mix: OpMix,
    /// Where the trace and verdict of a failing seed are written.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Disable compaction in the compact table (harness self-test).
    #[arg(long, hide = true)]
    pub no_compress: bool,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Compact)]
    pub table: KindArg,
    /// Overrides the trace header.
    #[arg(long)]
    pub capacity: Option<usize>,
    /// Overrides the trace header [default: 1].
    #[arg(long)]
    pub step: Option<usize>,
    /// Let the compact table grow instead of failing when full.
    #[arg(long)]
    pub grow: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 65_536)]
    pub capacity: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    #[arg(long, default_value_t = 32_768)]
    pub live_target: usize,
    #[arg(long, default_value_t = 50)]
    pub rounds: usize,
    /// Keys removed and added per round; with --adversarial, the number of same-hash keys.
    #[arg(long, default_value_t = 16_384)]
    pub batch: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Insert --batch keys sharing one home slot, then remove them all.
    #[arg(long)]
    pub adversarial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Compact,
    Tombstone,
}

impl From<KindArg> for TableKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Compact => TableKind::Compact,
            KindArg::Tombstone => TableKind::Tombstone,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_mix(s: &str) -> Result<OpMix, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, c, r] = parts[..] else {
        return Err("expected three comma-separated weights".into());
    };
    let w = |p: &str| {
        p.parse::<u32>()
            .map_err(|e| format!("bad weight `{p}`: {e}"))
    };
    Ok(OpMix::new(w(a)?, w(c)?, w(r)?))
}

/// What a subcommand reports besides success.
pub enum Failure {
    /// A differential or benchmark assertion failed (exit 1).
    Check(String),
    /// Bad arguments or input (exit 2).
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fuzz(args) => fuzz::run(&args),
        Command::Trace(args) => trace::run(&args),
        Command::Bench(args) => bench::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

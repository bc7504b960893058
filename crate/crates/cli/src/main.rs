//! `mrga`: generate population files, run block-partitioned GA jobs, sweep
//! population sizes, run the single-process baseline and emit plot data.
//!
//! Exit codes: 0 success, 1 I/O or data error, 2 usage or configuration
//! error, 3 resource limit exceeded.

mod commands;
mod size;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use mrga_core::engine::Mode;

use crate::commands::CliError;
use crate::size::{parse_bounds, parse_size};

#[derive(Debug, Parser)]
#[command(
    name = "mrga",
    version,
    about = "Block-partitioned MapReduce-style genetic algorithm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random population file and its block manifest.
    Genpop(GenpopArgs),
    /// Run one job over an existing population file.
    Run(RunArgs),
    /// Run jobs over several population sizes, modes and seeds; write a CSV.
    Sweep(SweepArgs),
    /// Run the GA on one in-memory population without blocks.
    Baseline(BaselineArgs),
    /// Turn a sweep CSV into two-column series files for plotting.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenpopArgs {
    /// Number of chromosomes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u32).range(1..))]
    dim: u32,
    /// Search domain as `lo,hi`.
    #[arg(long, default_value = "-100,100", value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: (f64, f64),
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Block size in bytes; suffixes KB/MB/GB (binary) accepted.
    #[arg(long, default_value = "128MiB", value_parser = parse_size)]
    block_size: u64,
    #[arg(long, default_value = "sphere")]
    objective: String,
}

/// Evolution knobs shared by run, sweep and baseline.
#[derive(Debug, Clone, Args)]
struct GaArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    iters: u64,
    #[arg(long, default_value_t = 0.01)]
    mutation_rate: f64,
    #[arg(long, default_value_t = 0.8)]
    crossover_rate: f64,
    #[arg(long, default_value_t = 0.5)]
    keep_fraction: f64,
    /// Fraction of each map's final population sent to the reducer.
    #[arg(long, default_value_t = 0.01)]
    elite_rate: f64,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    input: PathBuf,
    /// Manifest sidecar; defaults to `<input>.manifest` when present.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Re-split the file with this block size instead of reading a manifest.
    #[arg(long, value_parser = parse_size)]
    block_size: Option<u64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Mode,
    #[command(flatten)]
    ga: GaArgs,
    /// Reduce-phase iterations; defaults to --iters.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    reduce_iters: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum concurrent map tasks; defaults to the number of CPUs.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    parallelism: Option<u64>,
    #[arg(long, default_value = "sphere")]
    objective: String,
    /// Append an experiment row to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Strictly increasing population sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "basic,elite", value_parser = parse_mode)]
    modes: Vec<Mode>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u32).range(1..))]
    dim: u32,
    #[arg(long, default_value = "-100,100", value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: (f64, f64),
    #[command(flatten)]
    ga: GaArgs,
    /// Block size in bytes.
    #[arg(long, default_value = "128MiB", value_parser = parse_size, conflicts_with = "block_capacity")]
    block_size: u64,
    /// Block size expressed as chromosomes per block.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    block_capacity: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    parallelism: Option<u64>,
    #[arg(long, default_value = "sphere")]
    objective: String,
    /// Directory for temporary population files; a fresh temp dir by default.
    #[arg(long)]
    workdir: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u32).range(1..))]
    dim: u32,
    #[arg(long, default_value = "-100,100", value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: (f64, f64),
    #[command(flatten)]
    ga: GaArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Refuse to run when the estimated footprint exceeds this many bytes.
    #[arg(long, value_parser = parse_size)]
    mem_limit: Option<u64>,
    #[arg(long, default_value = "sphere")]
    objective: String,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: mrga_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                let mut cmd = Cli::command();
                cmd.build();
                let sub = std::env::args().nth(1).unwrap_or_default();
                let usage = match cmd.find_subcommand_mut(&sub) {
                    Some(sub) => sub.render_usage(),
                    None => cmd.render_usage(),
                };
                eprintln!("\n{usage}");
            }
            return ExitCode::from(commands::EXIT_USAGE);
        }
    };
    let outcome = match cli.command {
        Command::Genpop(a) => commands::genpop(a),
        Command::Run(a) => commands::run(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Baseline(a) => commands::baseline(a),
        Command::Report(a) => commands::report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("mrga: {message}");
            ExitCode::from(code)
        }
    }
}

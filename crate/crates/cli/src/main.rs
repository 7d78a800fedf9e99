//! `aurum` — command-line front end for the leveraged-tracking toolkit.
//!
//! Every command reads plain CSV, writes its outputs into `--out-dir`
//! (default `.`, overridable via `AURUM_OUT_DIR`), and refuses to overwrite
//! existing files unless `--force` is given. Given the same inputs and
//! flags, every command produces byte-identical outputs.

mod artifacts;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Format, RunContext};

#[derive(Parser)]
#[command(name = "aurum", version, about = "Leveraged fund tracking & replication toolkit")]
struct RunConfig {
    /// Directory all output files are written to.
    #[arg(long, global = true, env = "AURUM_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Format for report/summary files (series files are always CSV).
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Overwrite existing output files instead of refusing.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and align input CSVs onto their shared trading dates.
    Ingest(commands::IngestArgs),
    /// Generate a seeded synthetic market (spot, rates, rolled futures).
    Simulate(commands::SimulateArgs),
    /// Build a roll schedule and spliced continuous series from contract files.
    Roll(commands::RollArgs),
    /// Compound a daily-reset leveraged benchmark from an underlying series.
    Benchmark(commands::BenchmarkArgs),
    /// Regress one series' returns on another's across holding periods.
    Regress(commands::RegressArgs),
    /// Fit fixed sum-to-one replication weights by constrained least squares.
    ReplicateStatic(commands::ReplicateStaticArgs),
    /// Simulate the daily-rebalanced leveraged futures portfolio.
    ReplicateDynamic(commands::ReplicateDynamicArgs),
    /// Tracking metrics of one series against a reference.
    Report(commands::ReportArgs),
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let ctx = RunContext {
        out_dir: config.out_dir,
        format: config.format,
        force: config.force,
    };
    let result = match &config.command {
        Command::Ingest(args) => commands::run_ingest(args, &ctx),
        Command::Simulate(args) => commands::run_simulate(args, &ctx),
        Command::Roll(args) => commands::run_roll(args, &ctx),
        Command::Benchmark(args) => commands::run_benchmark(args, &ctx),
        Command::Regress(args) => commands::run_regress(args, &ctx),
        Command::ReplicateStatic(args) => commands::run_replicate_static(args, &ctx),
        Command::ReplicateDynamic(args) => commands::run_replicate_dynamic(args, &ctx),
        Command::Report(args) => commands::run_report(args, &ctx),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

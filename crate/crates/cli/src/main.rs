//! `ecgaug`: ingest, preprocess, split, augment, score and render ECG
//! records.

mod commands;
mod failure;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser)]
#[command(
    name = "ecgaug",
    version,
    about = "Randomized ECG augmentation pipeline"
)]
struct Cli {
    /// Seed for shuffling and dataset bookkeeping; overrides the policy seed
    /// when augmenting
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for per-record fan-out (output does not depend on it)
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,

    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Info)]
    log_level: LogLevel,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
    Trace,
}

impl From<LogLevel> for log::LevelFilter {
    fn from(level: LogLevel) -> Self {
        match level {
            LogLevel::Error => log::LevelFilter::Error,
            LogLevel::Warn => log::LevelFilter::Warn,
            LogLevel::Info => log::LevelFilter::Info,
            LogLevel::Debug => log::LevelFilter::Debug,
            LogLevel::Trace => log::LevelFilter::Trace,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a manifest from a directory of raw containers and a label CSV
    Ingest(commands::ingest::IngestArgs),
    /// Scale, decimate and pad every record of a raw manifest
    Preprocess(commands::preprocess::PreprocessArgs),
    /// Shuffle a manifest into train, validation and test manifests
    Split(commands::split::SplitArgs),
    /// Apply an augmentation policy and write a batch file or containers
    Augment(commands::augment::AugmentArgs),
    /// Score a prediction CSV against a manifest
    Score(commands::score::ScoreArgs),
    /// Render a record, optionally with its augmented version, as SVG
    Render(commands::render::RenderArgs),
}

/// Settings shared by every subcommand.
#[derive(Clone, Copy)]
pub struct Global {
    pub seed: Option<u64>,
    pub workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level.into())
        .format_target(false)
        .format_timestamp(None)
        .init();
    let global = Global {
        seed: cli.seed,
        workers: cli
            .workers
            .map(usize::from)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest::run(&args, global),
        Command::Preprocess(args) => commands::preprocess::run(&args, global),
        Command::Split(args) => commands::split::run(&args, global),
        Command::Augment(args) => commands::augment::run(&args, global),
        Command::Score(args) => commands::score::run(&args),
        Command::Render(args) => commands::render::run(&args, global),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => report(&failure),
    }
}

fn report(failure: &Failure) -> ExitCode {
    eprintln!("error: {:#}", failure.error());
    ExitCode::from(failure.exit_code())
}

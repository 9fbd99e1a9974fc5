//! `shobdosetu-forge`: batch driver for corpus building, augmentation,
//! WER/DER scoring and diarization post-processing.

mod commands;
mod config;
mod error;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ToolkitConfig;
use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "shobdosetu-forge", version, about = "Long-form Bengali speech data toolkit")]
struct Cli {
    /// JSON configuration document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = one per core). Never changes output bytes.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Log progress to standard error (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a JSONL manifest from subtitle chunks and recordings.
    BuildCorpus(commands::BuildCorpusArgs),
    /// Generate degraded copies of manifest entries.
    Augment(commands::AugmentArgs),
    /// Word error rate of hypothesis transcripts.
    ScoreWer(commands::ScoreWerArgs),
    /// Diarization error rate of hypothesis RTTM against reference RTTM.
    ScoreDer(commands::ScoreDerArgs),
    /// Merge, filter and round hypothesis RTTM segments.
    Post(commands::PostArgs),
    /// Exhaustive post-processing parameter search scored by pooled DER.
    GridSearch(commands::GridArgs),
}


fn run(cli: Cli) -> CliResult<()> {
    let mut config = ToolkitConfig::load(cli.config.as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::input(format!("thread pool: {e}")))?;
    match cli.command {
        Command::BuildCorpus(a) => commands::build_corpus(a, &mut config, &pool),
        Command::Augment(a) => commands::augment(a, &mut config, &pool),
        Command::ScoreWer(a) => commands::score_wer(a, &mut config),
        Command::ScoreDer(a) => commands::score_der(a, &mut config, &pool),
        Command::Post(a) => commands::post(a, &mut config),
        Command::GridSearch(a) => commands::grid_search(a, &mut config, &pool),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

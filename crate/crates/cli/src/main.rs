//! Command-line pipeline for model-schedule optimization: generate
//! schedule-quality data, train the predictor, validate it, search under
//! a latency budget and evaluate the results.
//!
//! Exit codes: 0 success, 2 config error, 3 infeasible budget,
//! 4 incompatible checkpoint, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use modelsched_core::Error as CoreError;

use modelsched_cli::commands;
use modelsched_cli::context::{Ctx, OracleChoice};

#[derive(Parser)]
#[command(
    name = "modelsched",
    about = "Schedule search for denoising-model zoos under latency budgets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the command's primary seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quality oracle.
    #[arg(long, value_enum, default_value = "lab")]
    oracle: OracleChoice,
}

#[derive(Subcommand)]
enum Command {
    /// Sample schedules, grade them with the oracle, write a dataset.
    GenData {
        #[command(flatten)]
        common: Common,
        /// Number of records (defaults to the config's data.count).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Train the predictor on a dataset and write a checkpoint.
    Train {
        #[command(flatten)]
        common: Common,
        /// Dataset file (defaults to <out>/dataset.txt).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Report Kendall's tau of a checkpoint on a dataset.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Checkpoint file (defaults to <out>/predictor.ckpt).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Dataset file (defaults to <out>/dataset.txt).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Predictor-guided evolutionary search under a budget (3 seeds).
    Search {
        #[command(flatten)]
        common: Common,
        /// Checkpoint file (defaults to <out>/predictor.ckpt).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Budget in milliseconds (defaults to the config's budgets_ms).
        #[arg(long)]
        budget_ms: Option<f64>,
    },
    /// Best single-model schedule per zoo member at a budget.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        budget_ms: Option<f64>,
    },
    /// Decode schedules from a file; print plans, costs and quality.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Schedule file ("sampler length entries" rows).
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Exhaustive search of small spaces with the true oracle.
    BruteForce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        budget_ms: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CoreError> {
    match cli.command {
        Command::GenData { common, count } => {
            let ctx = ctx_of(&common)?;
            commands::gen_data::run(&ctx, count)
        }
        Command::Train { common, data } => {
            let ctx = ctx_of(&common)?;
            commands::train::run(&ctx, data, common.seed)
        }
        Command::Validate {
            common,
            checkpoint,
            data,
        } => {
            let ctx = ctx_of(&common)?;
            commands::validate::run(&ctx, checkpoint, data)
        }
        Command::Search {
            common,
            checkpoint,
            budget_ms,
        } => {
            let ctx = ctx_of(&common)?;
            commands::search::run(&ctx, checkpoint, budget_ms)
        }
        Command::Baseline { common, budget_ms } => {
            let ctx = ctx_of(&common)?;
            commands::baseline::run(&ctx, budget_ms)
        }
        Command::Eval { common, schedule } => {
            let ctx = ctx_of(&common)?;
            commands::eval::run(&ctx, schedule)
        }
        Command::BruteForce { common, budget_ms } => {
            let ctx = ctx_of(&common)?;
            commands::brute_force::run(&ctx, budget_ms)
        }
    }
}

fn ctx_of(common: &Common) -> Result<Ctx, CoreError> {
    Ctx::new(
        &common.config,
        common.seed,
        common.out.clone(),
        common.oracle,
    )
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::Config(_) | CoreError::Parse { .. } => 2,
        CoreError::InfeasibleBudget(_) => 3,
        CoreError::IncompatibleCheckpoint(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

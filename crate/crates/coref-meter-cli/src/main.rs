//! `coref-meter`: every operation of the workbench behind one binary.
//!
//! Exit codes: 0 on success (including `--help`/`--version`), 1 on any
//! input or usage error, 2 when an internal invariant is violated (a
//! panic; always a bug). Reports go to stdout unless `--out` is given and
//! are written atomically; diagnostics go to stderr only, so reports can
//! be piped.
//!
//! Every report embeds the tool version and a hash of the semantic
//! configuration (inputs, seed, options; not `--threads` or `--out`), so
//! a report can be traced back to the run that produced it and reruns can
//! be compared byte for byte. Output never depends on the worker-thread
//! count, which comes from `--threads`, then `COREF_METER_THREADS`, then
//! the core count.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod cmd;
mod config;
mod input;
mod report;

#[derive(Parser, Debug)]
#[command(name = "coref-meter", version, about = "Coreference evaluation and plausibility measurement workbench")]
struct Cli {
    /// TOML file supplying default flag values, one table per subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<std::path::PathBuf>,

    /// Worker threads (overrides COREF_METER_THREADS; default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score predicted coreference against gold (MUC, B3, CEAF, CoNLL F1).
    Score(cmd::score::ScoreArgs),
    /// Label mentions with contested coreference construction types.
    Classify(cmd::classify::ClassifyArgs),
    /// Type-disaggregated B3 report for a typed corpus.
    Disagg(cmd::disagg::DisaggArgs),
    /// Generalization gap between two disaggregated reports.
    Gap(cmd::gap::GapArgs),
    /// Paired sign-flip permutation test between two score columns.
    Permtest(cmd::permtest::PermtestArgs),
    /// Pronoun coreference benchmark operations.
    #[command(subcommand)]
    Pcr(cmd::pcr::PcrCommand),
    /// Plausibility model operations.
    #[command(subcommand)]
    Plaus(cmd::plaus::PlausCommand),
    /// Concavity and local-extremum checks over abstraction grids.
    Consistency(cmd::consistency::ConsistencyArgs),
    /// Ranking quality of plausibility scores against binary labels.
    Auc(cmd::auc::AucArgs),
}

fn main() -> ExitCode {
    let argv = match config::merge_config_args(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };

    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }

    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli.command))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(_) => {
            // The panic hook has already written the message to stderr.
            eprintln!("error: internal invariant violated; this is a bug");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Score(args) => cmd::score::run(args),
        Command::Classify(args) => cmd::classify::run(args),
        Command::Disagg(args) => cmd::disagg::run(args),
        Command::Gap(args) => cmd::gap::run(args),
        Command::Permtest(args) => cmd::permtest::run(args),
        Command::Pcr(args) => cmd::pcr::run(args),
        Command::Plaus(args) => cmd::plaus::run(args),
        Command::Consistency(args) => cmd::consistency::run(args),
        Command::Auc(args) => cmd::auc::run(args),
    }
}

/// Pins the rayon pool size. Parallelism only changes scheduling, never
/// report content; the fallback chain is flag, env var, core count.
fn init_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("COREF_METER_THREADS") {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                anyhow::anyhow!("COREF_METER_THREADS must be a positive integer, got {v:?}")
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        anyhow::ensure!(n >= 1, "thread count must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("failed to size the worker pool: {e}"))?;
    }
    Ok(())
}

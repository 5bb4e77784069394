//! `gsw`: sliced transport distances between empirical samples.
//!
//! Three subcommands share a master seed and a thread-count knob:
//! `dist` prints one distance, `experiment` sweeps fast-vs-reference
//! error across dimensions, `xi` estimates the concentration functional
//! and fits its decay rate. Every output is a pure function of the
//! arguments; `--threads` changes wall time only, never bytes.

mod dist;
mod experiment;
mod fail;
mod fmt;
mod gen;
mod svg;
mod xi;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "gsw", version, about = "sliced transport distances between empirical samples")]
struct Cli {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Directory for result files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distance between two CSV sample files.
    Dist(dist::DistArgs),
    /// Fast-vs-reference error sweep across dimensions.
    Experiment(experiment::ExperimentArgs),
    /// Concentration diagnostics across dimensions.
    Xi(xi::XiArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Dist(args) => dist::run(cli.seed, args),
        Command::Experiment(args) => experiment::run(cli.seed, &cli.out_dir, args),
        Command::Xi(args) => xi::run(cli.seed, &cli.out_dir, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

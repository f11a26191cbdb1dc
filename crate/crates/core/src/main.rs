use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use varlab::cli::{run_file, Task};

/// Solve λ, μ and d problems on discretised manifolds from scenario files.
#[derive(Parser)]
#[command(name = "varlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario's task and write report.json plus CSV traces.
    Run {
        scenario: PathBuf,
        /// Output directory (default: the scenario's output.dir, else ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the invariant suite on the scenario's manifold and potential.
    Verify {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { scenario, out, seed } => run_file(scenario, out.as_deref(), *seed, None),
        Command::Verify { scenario, out, seed } => run_file(scenario, out.as_deref(), *seed, Some(Task::Verify)),
    };
    if let (Some(path), Some(report)) = (&outcome.report_path, &outcome.report) {
        println!("{}: {:?} -> {}", report.task.name(), report.status, path.display());
    }
    ExitCode::from(outcome.exit_code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use henon_cli::commands::{self, Outcome};
use henon_cli::output::OutputDir;
use henon_cli::{CliError, CliResult, RunConfig};

/// Least-energy solutions of Hénon-type equations and their concentration
/// as the weight exponent grows.
#[derive(Debug, Parser)]
#[command(name = "henon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the random start (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit with 0 even when a solve stops short of the tolerance.
    #[arg(long, global = true)]
    allow_partial: bool,
    /// Worker threads for sweep entries.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the symmetric problem at `alpha`.
    Solve,
    /// Solve at every entry of `alphas` and fit the scaling laws.
    Sweep,
    /// Compute the half-space limit constant with its truncation report.
    Limit,
    /// Check the Laplacian identity behind the reduction.
    ReduceCheck,
    /// Refit the scaling laws from an existing sweep table.
    Fit {
        /// Sweep table to read; `<out>/sweep.csv` by default.
        input: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        config.output = out;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let name = match cli.command {
        Command::Solve => "solve",
        Command::Sweep => "sweep",
        Command::Limit => "limit",
        Command::ReduceCheck => "reduce-check",
        Command::Fit { .. } => "fit",
    };
    let out = OutputDir::create(&config.output, &config, name)?;
    match cli.command {
        Command::Solve => commands::cmd_solve(&config, &out),
        Command::Sweep => commands::cmd_sweep(&config, &out),
        Command::Limit => commands::cmd_limit(&config, &out),
        Command::ReduceCheck => commands::cmd_reduce_check(&config, &out),
        Command::Fit { input } => {
            let input = input.unwrap_or_else(|| config.output.join("sweep.csv"));
            commands::cmd_fit(&config, &out, &input)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let allow_partial = cli.allow_partial;
    match run(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.partial && !allow_partial {
                eprintln!("some runs did not converge (use --allow-partial to accept)");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("henon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qsmarkov_cli::{execute, CommandKind, Options};

/// Experiments with quasi-stationary Markov measures: validation,
/// quasi-stationarity verdicts, product limits, equivalence classification,
/// mixing sweeps, density identities, finite-level isometry checks, and path
/// sampling.
#[derive(Debug, Parser)]
#[command(name = "qsm", version)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true, default_value = "experiment.toml")]
    config: PathBuf,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the command's main tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Overrides the configured depth.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Overrides the configured sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the spec(s) and run the additivity consistency check.
    Validate,
    /// Decide quasi-stationarity from the sequence's certificates.
    Qs,
    /// Declared limit matrix and forward-product convergence.
    Limit,
    /// Classify the pair as equivalent / singular / undecided.
    Classify,
    /// Compare the measure with its stationary limit.
    Stationary,
    /// Sweep the shift-mixing correlation over k.
    Mixing,
    /// Density identities and the Monte Carlo change of variables.
    RnCheck,
    /// Cuntz relations, cyclicity, and projection-valued-measure checks.
    RepCheck,
    /// Sample paths to CSV.
    Sample,
}

impl From<&Command> for CommandKind {
    fn from(command: &Command) -> Self {
        match command {
            Command::Validate => CommandKind::Validate,
            Command::Qs => CommandKind::Qs,
            Command::Limit => CommandKind::Limit,
            Command::Classify => CommandKind::Classify,
            Command::Stationary => CommandKind::Stationary,
            Command::Mixing => CommandKind::Mixing,
            Command::RnCheck => CommandKind::RnCheck,
            Command::RepCheck => CommandKind::RepCheck,
            Command::Sample => CommandKind::Sample,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = Options {
        config_path: cli.config,
        command: (&cli.command).into(),
        seed: cli.seed,
        out: cli.out,
        tol: cli.tol,
        depth: cli.depth,
        samples: cli.samples,
    };
    let outcome = execute(&options);
    print!("{}", outcome.report);
    ExitCode::from(outcome.exit_code as u8)
}

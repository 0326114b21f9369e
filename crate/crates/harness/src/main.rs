use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oldroyd_harness::commands::{finish, mms, probe, run, uniqueness};
use oldroyd_harness::{Result, RunConfig};

#[derive(Parser)]
#[command(name = "oldroyd", version, about = "Compressible Oldroyd-B experiments on structured grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve by fixed-point iteration and write ledgers, snapshots and a summary.
    Run(Common),
    /// Manufactured-solution convergence tables.
    Mms(Common),
    /// Paired runs from nearby data against the Gronwall envelope.
    Uniqueness(Common),
    /// Output distances of the fixed-point map under shrinking perturbations.
    Probe(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Run(a) => ("run", a),
        Command::Mms(a) => ("mms", a),
        Command::Uniqueness(a) => ("uniqueness", a),
        Command::Probe(a) => ("probe", a),
    };
    let loaded = RunConfig::load(&args.config);
    let out = args
        .out
        .clone()
        .or_else(|| loaded.as_ref().ok().map(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome: Result<_> = loaded.and_then(|cfg| match &cli.command {
        Command::Run(_) => run::execute(&cfg, &out),
        Command::Mms(_) => mms::execute(&cfg, &out, args.jobs),
        Command::Uniqueness(_) => uniqueness::execute(&cfg, &out, args.jobs),
        Command::Probe(_) => probe::execute(&cfg, &out),
    });
    ExitCode::from(finish(name, &out, &outcome) as u8)
}

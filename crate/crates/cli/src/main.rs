//! Reproducible experiments on hyper-site order parameters.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperspin_cli::{run, CommandKind, Outcome, OutputFormat, Overrides, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hyperspin", version, about = "Hyper-site order parameters on antiferromagnetic lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force identity, gauge, and round-trip suites over random hyper-sites.
    Verify(CommonArgs),
    /// Decompose a configured state into its hyper-site fields.
    Decompose(CommonArgs),
    /// Minimize and/or sample the Heisenberg energy, then decompose.
    Simulate(CommonArgs),
    /// Step-shrinking scan of the normalization deficit.
    Scan(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the verification tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format for field maps and residual reports.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Random hyper-sites per lattice kind (verify).
    #[arg(long)]
    samples: Option<usize>,
    /// Decompose hyper-sites concurrently.
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn execute(kind: CommandKind, args: &CommonArgs) -> hyperspin_core::Result<Outcome> {
    let config = match &args.config {
        Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        seed: args.seed,
        tolerance: args.tol,
        out_dir: args.out.as_ref().map(|p| p.display().to_string()),
        format: args.format.map(Into::into),
        samples: args.samples,
        parallel: args.parallel,
    };
    let resolved = config.resolve(kind, &overrides)?;
    run(kind, &resolved)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Decompose(a) => (CommandKind::Decompose, a),
        Command::Simulate(a) => (CommandKind::Simulate, a),
        Command::Scan(a) => (CommandKind::Scan, a),
    };
    match execute(kind, args) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fade_cli::{run, Command, RunConfig};

/// Direct and inverse source problems for the fractional advection-dispersion
/// equation. Log verbosity is read from FADE_LOG (e.g. FADE_LOG=info).
#[derive(Debug, Parser)]
#[command(name = "fade", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Solve the direct problem and write forward.csv
    Forward(Args),
    /// Reconstruct the source and write invert.csv, invert_meta.csv
    Invert(Args),
    /// Sweep λ and write lcurve.csv
    Lcurve(Args),
    /// Write the singular values of K (svd.csv) and perturbation norms (perturb.csv)
    Diagnose(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Noise seed, overriding the config
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FADE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (command, args) = match cli.command {
        Cmd::Forward(a) => (Command::Forward, a),
        Cmd::Invert(a) => (Command::Invert, a),
        Cmd::Lcurve(a) => (Command::Lcurve, a),
        Cmd::Diagnose(a) => (Command::Diagnose, a),
    };
    let result = RunConfig::load(&args.config, args.seed, args.out)
        .and_then(|cfg| run(command, &cfg));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fade: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

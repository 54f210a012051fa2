//! Batch CLI: `amcmc <mode> --config <path> [--seed N] [--replicas N] [--out DIR]`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use amcmc::config::{parse_config, ExperimentConfig, Mode};
use amcmc::experiment::run_experiment;

#[derive(Parser)]
#[command(
    name = "amcmc",
    version,
    about = "Adaptive random-walk Metropolis sampler, its diffusion limit, and verification runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the discrete adaptive sampler.
    Chain(RunArgs),
    /// Run the time-rescaled chain ensemble.
    Scaled(RunArgs),
    /// Simulate the limit diffusion and check its bounds.
    Sde(RunArgs),
    /// Verify the exact moment recursions and their limits.
    Moments(RunArgs),
    /// Check the bracket span condition on a grid.
    Hormander(RunArgs),
    /// Compare rescaled-chain moments against the diffusion.
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's replica count.
    #[arg(long)]
    replicas: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Chain(_) => Mode::Chain,
            Command::Scaled(_) => Mode::Scaled,
            Command::Sde(_) => Mode::Sde,
            Command::Moments(_) => Mode::Moments,
            Command::Hormander(_) => Mode::Hormander,
            Command::Compare(_) => Mode::Compare,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Chain(a)
            | Command::Scaled(a)
            | Command::Sde(a)
            | Command::Moments(a)
            | Command::Hormander(a)
            | Command::Compare(a) => a,
        }
    }
}

fn load_config(command: &Command) -> Result<ExperimentConfig, String> {
    let args = command.args();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut cfg = parse_config(&text).map_err(|e| e.to_string())?;
    if cfg.mode != command.mode() {
        return Err(format!(
            "config selects mode '{}' but the subcommand is '{}'",
            cfg.mode,
            command.mode()
        ));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(replicas) = args.replicas {
        cfg.replicas = replicas;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli.command) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run_experiment(&cfg) {
        Ok(verdict) => {
            for check in &verdict.checks {
                println!(
                    "{} {} (margin {:+.4e}): {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.margin,
                    check.details
                );
            }
            println!(
                "{}: artifacts in {}",
                if verdict.all_pass { "ok" } else { "FAILED" },
                cfg.out_dir.display()
            );
            if verdict.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ddsim_cli::{run, CliError, Command, ExperimentConfig};

#[derive(Parser, Debug)]
#[command(name = "ddsim", version, about = "Noisy dynamical decoupling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; stdout when absent and the config names none.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; the output does not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Report the continuous-control limits ℋ and ℬ.
    Limits,
    /// Fidelity against the number of pulses.
    SweepPulses,
    /// Continuous trajectories against the averaged master equation.
    Trajectories,
    /// Closed-form distance bounds against sampled distances.
    Bounds,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Limits => Command::Limits,
            Sub::SweepPulses => Command::SweepPulses,
            Sub::Trajectories => Command::Trajectories,
            Sub::Bounds => Command::Bounds,
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| ddsim_cli::ConfigError::field("--config", None, "a configuration file is required"))?;
    let text = std::fs::read_to_string(path)?;
    let mut config = ExperimentConfig::parse(&text)?;
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = cli.trials {
        if trials == 0 {
            return Err(ddsim_cli::ConfigError::field("--trials", None, "trials must be ≥ 1").into());
        }
        config.trials = trials;
    }
    let command = Command::from(cli.command);
    let output = with_threads(cli.threads, || run(command, &config))??;
    match cli.out.as_ref().or(config.output.as_ref()) {
        Some(dest) => std::fs::write(dest, output)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(output.as_bytes())?;
        }
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ddsim_cli::ConfigError::field("--threads", None, e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    if threads.is_some_and(|n| n > 1) {
        log::warn!("built without the parallel feature; --threads is ignored");
    }
    Ok(f())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ddsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

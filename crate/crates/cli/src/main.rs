use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use osim_cli::commands::{cmd_compare, cmd_evaluate, cmd_generate, cmd_select};
use osim_cli::config::{ExperimentConfig, RawConfig};
use osim_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "osim",
    version,
    about = "Opinion-aware influence maximization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `master_seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output path prefix; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Extra `key=value` assignment, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as edge list, attributes and id sidecar.
    Generate,
    /// Select seeds with the configured algorithm.
    Select,
    /// Estimate spreads of a seed list.
    Evaluate {
        /// Seed list file; overrides `seeds` in the config.
        #[arg(long)]
        seeds: Option<PathBuf>,
    },
    /// Select with several algorithms and evaluate each.
    Compare,
}

fn configure(common: &Common) -> CliResult<ExperimentConfig> {
    let mut raw = match &common.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    for s in &common.set {
        raw.set(s, "--set")?;
    }
    let mut cfg = ExperimentConfig::from_raw(&raw)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = Some(seed);
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn set_threads(threads: Option<usize>) -> CliResult<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::invalid("--threads must be ≥ 1"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    set_threads(cli.common.threads)?;
    let cfg = configure(&cli.common)?;
    match cli.command {
        Command::Generate => cmd_generate(&cfg),
        Command::Select => cmd_select(&cfg),
        Command::Evaluate { seeds } => cmd_evaluate(&cfg, seeds.as_deref()),
        Command::Compare => cmd_compare(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

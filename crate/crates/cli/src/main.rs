//! `hardy-verify`: batch runner for the radial Hardy/Rellich verifiers.
//!
//! Exit status: 0 when every job passes, 1 when any job fails numerically,
//! 2 on config errors or when any job is outside its theorem's hypotheses.

mod config;
mod error;
mod job;
mod output;
mod theorem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{JobKind, RunConfig};
use error::CliError;
use job::Overrides;

const DEFAULT_OUT: &str = "reports";

#[derive(Debug, Parser)]
#[command(name = "hardy-verify", version, about = "Numerical verification of radial Hardy-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Maximum number of jobs run concurrently.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for jobs without their own; overrides the top-level `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplier on every pass tolerance.
    #[arg(long = "tol-scale", global = true)]
    tol_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the `verify` jobs of a config.
    Verify(ConfigArg),
    /// Run the `sweep` jobs of a config.
    Sweep(ConfigArg),
    /// Run the `sharpness` jobs of a config.
    Sharpness(ConfigArg),
    /// Run the `mc-check` jobs of a config.
    McCheck(ConfigArg),
    /// Run every job of a config.
    Run(ConfigArg),
}

#[derive(Debug, Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

impl Command {
    fn split(&self) -> (&ConfigArg, Option<JobKind>) {
        match self {
            Command::Verify(c) => (c, Some(JobKind::Verify)),
            Command::Sweep(c) => (c, Some(JobKind::Sweep)),
            Command::Sharpness(c) => (c, Some(JobKind::Sharpness)),
            Command::McCheck(c) => (c, Some(JobKind::McCheck)),
            Command::Run(c) => (c, None),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let (arg, only) = cli.command.split();
    let cfg = RunConfig::load(&arg.config)?;
    let overrides = Overrides {
        seed: cli.seed,
        tol_scale: cli.tol_scale,
    };
    let jobs = job::plan(&cfg, only, overrides)?;
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let mut formats = cfg.output.formats.clone();
    formats.dedup();
    if formats.is_empty() {
        return Err(CliError::Config("output.formats is empty".into()));
    }

    let results = job::run_all(&jobs, &formats, cli.jobs.map(|n| n as usize))?;
    let mut counts = [0usize; 3];
    for r in &results {
        for (format, text) in &r.files {
            output::write_atomic(&dir, &format!("{}.{}", r.name, format.extension()), text)?;
        }
        println!(
            "{:<12} {} [{} {}] {}",
            r.verdict.label(),
            r.name,
            r.kind.label(),
            r.theorem_id,
            r.detail
        );
        counts[r.verdict as usize] += 1;
    }
    let [pass, fail, inadmissible] = counts;
    println!(
        "{} jobs: {pass} pass, {fail} fail, {inadmissible} inadmissible; reports in {}",
        results.len(),
        dir.display()
    );
    Ok(if inadmissible > 0 {
        2
    } else if fail > 0 {
        1
    } else {
        0
    })
}

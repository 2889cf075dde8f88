//! The `coarse-lab` experiment runner.
//!
//! Exit status: 0 when every verdict passes, 1 when anything is refuted,
//! 2 for configuration errors and failed runs.

mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::{ActionDescriptor, ActionKind, Diagnostic, Experiment, ExperimentConfig, Params};
pub use run::{output_dir, run, RunManifest, RunStatus};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "coarse-lab", version, about = "Coarse geometry experiments on exact metric models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory (default: the config's `output`, else out/<config name>).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the space's point cap.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Run every *.toml in a directory.
    Batch { dir: PathBuf },
}

fn load(path: &Path, cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let (Some(cap), Some(space)) = (cli.cap, cfg.space.as_mut()) {
        space.cap = Some(cap);
    }
    Ok(cfg)
}

fn status_code(status: RunStatus) -> u8 {
    match status {
        RunStatus::Pass => 0,
        RunStatus::Refuted => 1,
        RunStatus::Error => 2,
    }
}

fn run_one(path: &Path, out: Option<&Path>, cli: &Cli) -> (u8, String) {
    let cfg = match load(path, cli) {
        Ok(c) => c,
        Err(e) => return (2, format!("{}: {e}", path.display())),
    };
    let dir = output_dir(&cfg, Some(path), out);
    match run(&cfg, &dir) {
        Ok(m) => (
            status_code(m.status),
            format!("{}: {:?} {} -> {}", path.display(), m.status, m.summary, dir.display()),
        ),
        Err(e) => (2, format!("{}: {e}", path.display())),
    }
}

/// Lists the `*.toml` files of a directory in name order.
pub fn batch_configs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    out.sort();
    Ok(out)
}

pub fn execute(cli: &Cli) -> u8 {
    match &cli.command {
        Command::Validate { config } => match load(config, cli) {
            Err(e) => {
                eprintln!("{e}");
                2
            }
            Ok(cfg) => {
                let diags = cfg.validate();
                for d in &diags {
                    println!("{d}");
                }
                if diags.is_empty() {
                    println!("ok");
                    0
                } else {
                    2
                }
            }
        },
        Command::Run { config } => {
            let (code, line) = run_one(config, cli.out.as_deref(), cli);
            if code == 2 {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
            code
        }
        Command::Batch { dir } => {
            let configs = match batch_configs(dir) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            let results = crate::par::map(&configs, |path| {
                let out = cli.out.as_ref().map(|o| {
                    o.join(path.file_stem().unwrap_or_default())
                });
                run_one(path, out.as_deref(), cli)
            });
            for (_, line) in &results {
                println!("{line}");
            }
            results.iter().map(|r| r.0).max().unwrap_or(0)
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(execute(&cli))
}

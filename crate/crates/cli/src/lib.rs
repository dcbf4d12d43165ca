//! Experiment driver for the `aircomp` library: reads a TOML experiment
//! description, runs one analysis and writes CSV (and optionally SVG)
//! results.

pub mod commands;
pub mod config;
pub mod figures;
pub mod output;
pub mod svg;

use clap::{Parser, Subcommand};
use config::{ExperimentConfig, FlagOverrides, Needs};
use figures::Figure;
use output::Outputs;
use std::ffi::OsString;
use std::path::PathBuf;

/// Exit status for a configuration that failed validation.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for a run that failed or a validation check that did not pass.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "aircomp", version, about = "CoMP analysis and simulation for 3D drone networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate per mode: simulation next to the matching closed form.
    Rate,
    /// Coverage over the SIR threshold grid.
    Coverage,
    /// Paired coverage of several modes against the first one.
    Compare,
    /// Frequency plan for one BPP realization per N.
    Plan {
        /// Use this planning radius in meters instead of solving for it.
        #[arg(long)]
        epsilon_override: Option<f64>,
    },
    /// Runs the library's invariant checks.
    Validate {
        #[arg(long, hide = true)]
        corrupt_tessellation: bool,
    },
    /// Regenerates one result figure from its preset.
    Fig {
        #[arg(value_enum)]
        id: Figure,
    },
}

fn env_vars() -> Vec<(String, String)> {
    std::env::vars().filter(|(k, _)| k.starts_with(config::ENV_PREFIX)).collect()
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let (preset, needs) = match &cli.command {
        Command::Rate => (toml::Table::new(), Needs::Rate),
        Command::Coverage => (toml::Table::new(), Needs::Coverage),
        Command::Compare => (toml::Table::new(), Needs::Compare),
        Command::Plan { .. } => (toml::Table::new(), Needs::Plan),
        Command::Validate { .. } => (toml::Table::new(), Needs::Nothing),
        Command::Fig { id } => (id.preset(), id.needs()),
    };
    let flags = FlagOverrides {
        seed: cli.seed,
        trials: cli.trials,
        out: cli.out.clone(),
        epsilon_override_m: match cli.command {
            Command::Plan { epsilon_override } => epsilon_override,
            _ => None,
        },
    };
    let cfg = match ExperimentConfig::load(preset, cli.config.as_deref(), env_vars(), &flags, needs) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid configuration");
            for d in &e.0 {
                eprintln!("  {d}");
            }
            return EXIT_CONFIG;
        }
    };
    let mut out = Outputs::new(&cfg.hash(), cfg.seed);
    let result = match &cli.command {
        Command::Rate => commands::rate(&cfg, "rate", &mut out).map(|_| true),
        Command::Coverage => commands::coverage(&cfg, "coverage", &mut out).map(|_| true),
        Command::Compare => commands::compare(&cfg, "compare", &mut out).map(|_| true),
        Command::Plan { .. } => commands::plan(&cfg, &mut out).map(|_| true),
        Command::Validate { corrupt_tessellation } => commands::validate(&cfg, *corrupt_tessellation, &mut out),
        Command::Fig { id } => id.run(&cfg, &mut out).map(|_| true),
    };
    let passed = match result {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_FAILURE;
        }
    };
    match out.commit(&cfg.output_dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_FAILURE;
        }
    }
    if passed {
        0
    } else {
        eprintln!("error: some checks failed");
        EXIT_FAILURE
    }
}

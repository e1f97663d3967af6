//! `pxbar`: reproducible experiments on simulated plasmonic memory crossbars.
//!
//! Every command loads one TOML experiment config, runs a deterministic
//! model, and emits CSV files whose first line records the config digest and
//! seed. Command-line flags override file values.

mod commands;
mod config;
mod error;
mod fixtures;
mod table;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use pxbar_core::ann::VmmMode;

use crate::commands::optics::{GridKind, SweepArgs};
use crate::commands::xbar::XbarArgs;
use crate::config::Experiment;
use crate::error::{CliError, Result};

const EXIT_CODES: &str = "Exit codes:\n  0  success\n  2  config or usage error\n  3  fixture schema error\n  4  model or output error";

#[derive(Parser)]
#[command(
    name = "pxbar",
    version,
    about = "Simulator of plasmonic nonvolatile memory crossbar arrays",
    after_help = EXIT_CODES
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config file (TOML)
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the config seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override the config output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the configured material table and echo it as CSV
    Materials {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sweep waveguide optics over a state or imbalance grid
    OpticsSweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid variable: "dn" (index imbalance) or "x" (crystalline fraction)
        #[arg(long, default_value = "dn")]
        grid: String,
        /// Uniform grid size (at least 3)
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Half-width of the dn grid
        #[arg(long, default_value_t = 0.05)]
        span: f64,
        /// Explicit comma-separated grid values, overriding the uniform grid
        #[arg(long, value_name = "V1,V2,...")]
        list: Option<String>,
    },
    /// Write-then-erase pulse sequence on one cell, logged per pulse
    MemoryDemo {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of graded write pulses before the erase
        #[arg(long, default_value_t = 20)]
        writes: u32,
    },
    /// Crossbar array experiments
    Xbar {
        #[command(flatten)]
        common: CommonArgs,
        #[command(subcommand)]
        cmd: XbarCmd,
    },
    /// Analog inference over weight fixtures, with energy accounting
    AnnInfer {
        #[command(flatten)]
        common: CommonArgs,
        /// Layer weight fixture, repeat once per layer in network order
        #[arg(long, value_name = "PATH", required = true)]
        weights: Vec<PathBuf>,
        /// Input samples, one comma-separated vector per line
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Expected class labels, one per line; enables the accuracy line
        #[arg(long, value_name = "PATH")]
        labels: Option<PathBuf>,
        /// Read mode: "ideal" or "nonideal"
        #[arg(long, default_value = "ideal")]
        mode: String,
    },
    /// Aggregate a recorded operation trace into an energy report
    Report {
        /// Trace CSV recorded by ann-infer
        #[arg(long, value_name = "PATH")]
        trace: PathBuf,
        /// Optional experiment config supplying seed and output directory
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Override the seed echoed into the output
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        /// Override the output directory
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum XbarCmd {
    /// Drive the array with fixture vectors and read column currents
    Vmm {
        /// Drive vectors, one comma-separated vector per line
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Preload cell states from a matrix fixture
        #[arg(long, value_name = "PATH")]
        states: Option<PathBuf>,
        /// Preload exact cell conductances from a matrix fixture
        #[arg(long, value_name = "PATH")]
        conductances: Option<PathBuf>,
        /// Read mode: "ideal" or "nonideal"
        #[arg(long, default_value = "ideal")]
        mode: String,
    },
    /// Closed-loop program the array toward a target conductance matrix
    Program {
        /// Target conductance matrix fixture (siemens)
        #[arg(long, value_name = "PATH")]
        targets: PathBuf,
    },
    /// Dump the electrical and optical state of every cell
    Snapshot {
        /// Preload cell states from a matrix fixture
        #[arg(long, value_name = "PATH")]
        states: Option<PathBuf>,
    },
}

fn load(common: &CommonArgs) -> Result<Experiment> {
    config::load_experiment(&common.config, common.seed, common.out.as_deref())
}

fn parse_mode(mode: &str) -> Result<VmmMode> {
    VmmMode::from_str(mode).map_err(|e| CliError::config(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Materials { common } => commands::materials::run(&load(&common)?),
        Command::OpticsSweep {
            common,
            grid,
            points,
            span,
            list,
        } => {
            let args = SweepArgs {
                grid: GridKind::from_str(&grid).map_err(CliError::config)?,
                points,
                span,
                list,
            };
            commands::optics::run(&load(&common)?, &args)
        }
        Command::MemoryDemo { common, writes } => {
            commands::memdemo::run(&load(&common)?, writes)
        }
        Command::Xbar { common, cmd } => {
            let args = match cmd {
                XbarCmd::Vmm {
                    input,
                    states,
                    conductances,
                    mode,
                } => XbarArgs::Vmm {
                    input,
                    states,
                    conductances,
                    mode: parse_mode(&mode)?,
                },
                XbarCmd::Program { targets } => XbarArgs::Program { targets },
                XbarCmd::Snapshot { states } => XbarArgs::Snapshot { states },
            };
            commands::xbar::run(&load(&common)?, &args)
        }
        Command::AnnInfer {
            common,
            weights,
            input,
            labels,
            mode,
        } => {
            let args = commands::ann::AnnArgs {
                weights,
                input,
                labels,
                mode: parse_mode(&mode)?,
            };
            commands::ann::run(&load(&common)?, &args)
        }
        Command::Report {
            trace,
            config,
            seed,
            out,
        } => {
            let exp = config
                .map(|path| config::load_experiment(&path, seed, out.as_deref()))
                .transpose()?;
            commands::report::run(&trace, exp.as_ref(), seed, out.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("pxbar: {err}");
        std::process::exit(err.exit_code());
    }
}

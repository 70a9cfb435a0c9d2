//! Command-line front end for the Pauli-mixture simulator.
//!
//! Subcommands: `rates` (theoretical decay rates + verdict), `pipeline`
//! (synthetic experiment, tomography, fit, classification), `classify`
//! (verdict via exit code), `tomo-demo` (single-point reconstruction).
//! Every option can also come from a JSON config file (`--config`); flags
//! override file values. Exit codes: 0 success/Markovian, 10 non-Markovian
//! (classify), 2 usage or configuration errors, 1 runtime failures.

mod commands;
mod config;
mod report;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use paulimix_core::channels::Preset;

use config::{parse_weights_arg, ExperimentConfig, Mode, OutputFormat, Overrides};

const EXIT_RUNTIME: i32 = 1;
const EXIT_CONFIG: i32 = 2;

#[derive(Parser)]
#[command(
    name = "paulimix",
    version,
    about = "Convex mixtures of Pauli semigroups: decay rates, synthetic experiments, and Markovianity classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write theoretical decay rates over a time grid plus a verdict record
    Rates(CommonArgs),
    /// Run the full synthetic pipeline: simulate, reconstruct, fit, classify
    Pipeline(CommonArgs),
    /// Print the verdict; exit 0 if Markovian, 10 if non-Markovian
    Classify(CommonArgs),
    /// Reconstruct one time point and compare against theory
    TomoDemo(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Bundled configuration fig2..fig6
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,

    /// Mixing weights x1,x2,x3 (requires --c)
    #[arg(long, value_parser = parse_weights_arg, conflicts_with = "preset")]
    weights: Option<[f64; 3]>,

    /// Two-way mixing parameter a, i.e. weights (0, 1-a, a) (requires --c)
    #[arg(long, conflicts_with_all = ["preset", "weights"])]
    two_mix_a: Option<f64>,

    /// Rate constant of the decoherence function
    #[arg(long)]
    c: Option<f64>,

    /// Grid start time
    #[arg(long)]
    t_start: Option<f64>,

    /// Grid end time
    #[arg(long)]
    t_end: Option<f64>,

    /// Number of grid points
    #[arg(long)]
    n: Option<usize>,

    /// Noise level on each Pauli expectation value
    #[arg(long)]
    sigma: Option<f64>,

    /// Noise seed
    #[arg(long)]
    seed: Option<u64>,

    /// Explicit mode (must match the subcommand)
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,

    /// Output path (relative paths honor PAULIMIX_OUT_DIR)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format: csv or json
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,

    /// JSON config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse::<Preset>().map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse::<OutputFormat>().map_err(|e| e.to_string())
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            preset: self.preset,
            weights: self.weights,
            two_mix_a: self.two_mix_a,
            c: self.c,
            t_start: self.t_start,
            t_end: self.t_end,
            n: self.n,
            sigma: self.sigma,
            seed: self.seed,
            mode: self.mode,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

/// Marker wrapped around configuration-resolution failures so they map to
/// the usage exit code.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn resolve(args: &CommonArgs, required_mode: Mode) -> Result<config::Resolved> {
    let file = match &args.config {
        Some(path) => ExperimentConfig::load(path),
        None => Ok(ExperimentConfig::default()),
    }
    .map_err(|e| anyhow::Error::new(ConfigError(e)))?;
    config::resolve(&file, &args.overrides(), required_mode)
        .map_err(|e| anyhow::Error::new(ConfigError(e)))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Rates(args) => commands::cmd_rates(&resolve(&args, Mode::Theory)?),
        Command::Pipeline(args) => commands::cmd_pipeline(&resolve(&args, Mode::FullPipeline)?),
        Command::Classify(args) => commands::cmd_classify(&resolve(&args, Mode::Theory)?),
        Command::TomoDemo(args) => {
            commands::cmd_tomo_demo(&resolve(&args, Mode::SyntheticExperiment)?)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err.downcast_ref::<ConfigError>().is_some()
                || err.downcast_ref::<paulimix_core::Error>().is_some_and(config_like)
            {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            };
            std::process::exit(code);
        }
    }
}

/// Core errors that indicate bad user input rather than runtime failure.
fn config_like(err: &paulimix_core::Error) -> bool {
    use paulimix_core::Error::*;
    matches!(
        err,
        InvalidWeights(_) | OutOfRange { .. } | InvalidGrid(_) | NegativeTime(_)
    )
}

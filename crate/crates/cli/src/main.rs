//! Command-line front end for confinement-model Raman analysis.
//!
//! Subcommands:
//! - `simulate`: forward-model spectrum for a diameter or a distribution;
//! - `fit`: invert a measured spectrum to a diameter, an interval, or grid
//!   weights;
//! - `thermal`: Stokes/anti-Stokes ratios across powers and the
//!   bulk-relative thermal conductivity;
//! - `features`: peak features per file plus the zero-power extrapolation.
//!
//! Exit codes: 0 on success, 2 for usage or input validation problems, 3
//! when a computation fails on valid inputs. Outputs are deterministic:
//! identical inputs and flags produce byte-identical files.

// Validations use !(x > 0.0) on purpose: the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ramanwire::{Error, Geometry};

use config::RunConfig;

/// Error carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable inputs, or validation failures: exit 2.
    Usage(String),
    /// A computation failed on structurally valid inputs: exit 3.
    Computation(String),
}

impl CliError {
    /// Maps a library error to an exit class. Input-shaped problems are
    /// usage errors; analysis failures are computation errors.
    fn from_input_error(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InsufficientData { .. }
            | Error::Validation(_)
            | Error::Domain(_)
            | Error::RankDeficient(_)
            | Error::MissingAbsorption { .. }
            | Error::Io(_)
            | Error::Json(_) => CliError::Usage(e.to_string()),
            Error::NoPeak(_)
            | Error::IncompletePeak(_)
            | Error::NonphysicalRatio { .. }
            | Error::NoFit(_) => CliError::Computation(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ramanwire",
    about = "Confinement-model Raman simulation, diameter fitting, and Stokes/anti-Stokes thermometry",
    version
)]
struct Cli {
    /// JSON configuration file (model parameters, absorption table,
    /// thermometry constants).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's output_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Zone integration geometry override.
    #[arg(long, global = true)]
    geometry: Option<Geometry>,

    /// Gauss-Legendre node count override.
    #[arg(long, global = true)]
    quad_nodes: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a model spectrum and extract its peak features.
    Simulate(SimulateArgs),
    /// Fit a measured spectrum to the forward model.
    Fit(FitArgs),
    /// Stokes/anti-Stokes ratios per power and relative thermal
    /// conductivity.
    Thermal(ThermalArgs),
    /// Peak features per spectrum file, with zero-power extrapolation when
    /// power metadata is present.
    Features(FeaturesArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Wavenumber grid as LO:HI:STEP in cm^-1, e.g. 250:320:0.1.
    #[arg(long)]
    grid: String,

    /// Single wire diameter in nm.
    #[arg(long, allow_negative_numbers = true, group = "diameter")]
    d: Option<f64>,

    /// Uniform diameter interval as LO:HI in nm.
    #[arg(long, group = "diameter")]
    interval: Option<String>,

    /// JSON file holding a diameter distribution.
    #[arg(long, group = "diameter")]
    dist: Option<PathBuf>,

    /// Output file prefix.
    #[arg(long, default_value = "simulated")]
    prefix: String,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Measured spectrum (two-column text).
    measured: PathBuf,

    /// Fit family.
    #[arg(long, value_parser = ["point", "interval", "grid"], default_value = "point")]
    mode: String,

    /// Diameter search range LO:HI in nm (point and interval modes).
    #[arg(long, default_value = "3:30")]
    d_range: String,

    /// Comma-separated diameter grid in nm (grid mode).
    #[arg(long)]
    d_grid: Option<String>,

    #[command(flatten)]
    prep: PrepArgs,

    /// Output file prefix (defaults to the input file stem).
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Debug, Args)]
struct ThermalArgs {
    /// Sample manifest: JSON array of
    /// {stokes_file, antistokes_file, meta} entries.
    #[arg(long)]
    manifest: PathBuf,

    /// Bulk-reference manifest in the same format.
    #[arg(long)]
    bulk_manifest: PathBuf,

    /// Convert delivered powers to equivalent absorbed powers at this
    /// wavelength (nm) using the configured absorption table.
    #[arg(long)]
    reference_wavelength: Option<f64>,

    #[command(flatten)]
    prep: PrepArgs,

    /// Output file prefix.
    #[arg(long, default_value = "thermal")]
    prefix: String,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    /// Spectrum files; a sidecar FILE.meta.json supplies power metadata.
    #[arg(required = true)]
    files: Vec<PathBuf>,

    #[command(flatten)]
    prep: PrepArgs,

    /// Output file prefix.
    #[arg(long, default_value = "features")]
    prefix: String,
}

/// Shared preprocessing flags.
#[derive(Debug, Args)]
struct PrepArgs {
    /// Crop to this wavenumber window LO:HI (applied to |shift| for
    /// anti-Stokes bands).
    #[arg(long)]
    window: Option<String>,

    /// Edge fraction for the linear baseline fit.
    #[arg(long, default_value_t = 0.1)]
    edge_fraction: f64,

    /// Skip baseline subtraction.
    #[arg(long)]
    no_baseline: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(geometry) = cli.geometry {
        config.params.geometry = geometry;
    }
    if let Some(nodes) = cli.quad_nodes {
        config.params.quad_nodes = nodes;
    }
    config.validate()?;
    let out_dir = cli.out.unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Usage(format!(
            "cannot create output directory {}: {e}",
            out_dir.display()
        ))
    })?;

    match cli.command {
        Command::Simulate(args) => commands::simulate(&config, &out_dir, args),
        Command::Fit(args) => commands::fit(&config, &out_dir, args),
        Command::Thermal(args) => commands::thermal(&config, &out_dir, args),
        Command::Features(args) => commands::features(&config, &out_dir, args),
    }
}

/// Parses "LO:HI" into an ordered pair.
fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "{what} must be LO:HI, got {text:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|e| CliError::Usage(format!("bad {what} low bound {:?}: {e}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|e| CliError::Usage(format!("bad {what} high bound {:?}: {e}", parts[1])))?;
    if !(lo < hi) {
        return Err(CliError::Usage(format!(
            "{what} bounds must satisfy LO < HI, got {text:?}"
        )));
    }
    Ok((lo, hi))
}

/// Parses "LO:HI:STEP" into an inclusive uniform grid.
fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "grid must be LO:HI:STEP, got {text:?}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad grid component {p:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(lo < hi) || !(step > 0.0) {
        return Err(CliError::Usage(format!(
            "grid must satisfy LO < HI and STEP > 0, got {text:?}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

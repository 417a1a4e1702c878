//! Command-line front end for the `mwgate` models.
//!
//! Exit codes: 0 on success, 2 for usage errors, 3 for invalid
//! configuration or inputs, 4 for numerical or output failures. Every
//! failure also prints one `error kind=... code=... message="..."` line on
//! stderr.

pub mod commands;
pub mod config;
pub mod error;
pub mod matrix;
pub mod output;
pub mod selftest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{CurveRequest, FluxUnit};
use crate::config::{parse_grid, RunConfig};
use crate::error::{error_line, CliError, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "mwgate", version, about = "Scattering sweeps for SQUID phase shifters and waveguide-QED gates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetUnit {
    Phi0,
    Wb,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Configuration file; built-in defaults are used without one.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the configured one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn grid_arg(s: &str) -> Result<(usize, usize), String> {
    parse_grid(s).ok_or_else(|| format!("expected NxM, got `{s}`"))
}

fn numbers<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn four(s: &str) -> Result<[f64; 4], String> {
    numbers::<4>(s)
}

fn two(s: &str) -> Result<[f64; 2], String> {
    numbers::<2>(s)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission over a grid of side and middle SQUID fluxes.
    SweepFlux {
        #[command(flatten)]
        common: Common,
        /// Grid size as NxM, overriding the configured one.
        #[arg(long, value_parser = grid_arg)]
        grid: Option<(usize, usize)>,
    },
    /// Inductances and flux biases for a target phase with full transmission.
    Design {
        #[command(flatten)]
        common: Common,
        /// Target phase in radians.
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
    },
    /// Unit-transmission curve in the principal-branch flux plane.
    FtCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Flux window as flux1_lo,flux1_hi,flux2_lo,flux2_hi in Phi0.
        #[arg(long, value_parser = four, allow_negative_numbers = true)]
        window: Option<[f64; 4]>,
        /// Fit the line phase so the curve ends at f1a,f2a,f1b,f2b.
        #[arg(long, value_parser = four)]
        fit_to: Option<[f64; 4]>,
        /// Line-phase search range for the fit, in radians.
        #[arg(long, value_parser = two, default_value = "1.6,2.2", allow_negative_numbers = true)]
        phi_range: [f64; 2],
    },
    /// Analytic single-photon transmission over the configured detunings.
    SinglePhoton {
        #[command(flatten)]
        common: Common,
        /// Coupling ratios; defaults to the configured one.
        #[arg(long, value_delimiter = ',')]
        gammas: Vec<f64>,
    },
    /// Two-photon nonlinear phase, reflection and pulse-width errors.
    TwoPhoton {
        #[command(flatten)]
        common: Common,
        /// Coupling ratios; defaults to the configured one.
        #[arg(long, value_delimiter = ',')]
        gammas: Vec<f64>,
    },
    /// Detuning band with transmission amplitude above a threshold.
    Band {
        #[command(flatten)]
        common: Common,
        /// Number of coupling ratios spread evenly over (0, 2).
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Amplitude threshold.
        #[arg(long, default_value_t = 0.9_f64.sqrt())]
        threshold: f64,
    },
    /// Bias currents realizing target fluxes through a crosstalk matrix.
    Compensate {
        #[command(flatten)]
        common: Common,
        /// Matrix file with a `units = ...` header line.
        #[arg(long)]
        matrix: PathBuf,
        /// Target flux per SQUID, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        target: Vec<f64>,
        #[arg(long, value_enum, default_value_t = TargetUnit::Phi0)]
        target_units: TargetUnit,
    },
    /// Runs a seeded invariant suite.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::SweepFlux { common, .. }
            | Command::Design { common, .. }
            | Command::FtCurve { common, .. }
            | Command::SinglePhoton { common, .. }
            | Command::TwoPhoton { common, .. }
            | Command::Band { common, .. }
            | Command::Compensate { common, .. }
            | Command::Selftest { common } => common,
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn pairs(v: &[f64; 4]) -> [(f64, f64); 2] {
    [(v[0], v[1]), (v[2], v[3])]
}

fn execute(command: &Command) -> Result<(), CliError> {
    let cfg = load_config(command.common())?;
    match command {
        Command::SweepFlux { grid, .. } => commands::sweep_flux(&cfg, *grid),
        Command::Design { theta, .. } => commands::design(&cfg, *theta),
        Command::FtCurve { samples, window, fit_to, phi_range, .. } => commands::ft_curve(
            &cfg,
            &CurveRequest {
                samples: *samples,
                window: *window,
                fit_to: fit_to.as_ref().map(pairs),
                phi_range: (phi_range[0], phi_range[1]),
            },
        ),
        Command::SinglePhoton { gammas, .. } => commands::single_photon(&cfg, gammas),
        Command::TwoPhoton { gammas, .. } => commands::two_photon(&cfg, gammas),
        Command::Band { points, threshold, .. } => commands::band(&cfg, *points, *threshold),
        Command::Compensate { matrix, target, target_units, .. } => {
            let unit = match target_units {
                TargetUnit::Phi0 => FluxUnit::Phi0,
                TargetUnit::Wb => FluxUnit::Weber,
            };
            commands::compensate(&cfg, matrix, target, unit)
        }
        Command::Selftest { .. } => selftest::selftest(&cfg),
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            eprintln!("{}", error_line("usage", EXIT_USAGE, first));
            return EXIT_USAGE;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), e.exit_code(), &e.to_string()));
            e.exit_code()
        }
    }
}

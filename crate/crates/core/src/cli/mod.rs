//! Command-line front end.
//!
//! Every command reads an optional JSON [`RunConfig`], applies flag
//! overrides, hashes the merged configuration into a [`RunManifest`], and
//! writes data files under the run directory. Only a short summary goes to
//! stdout.
//!
//! [`RunManifest`]: crate::protocol::RunManifest

pub mod commands;
pub mod config;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{parse_scan, BlochSection, QuenchSection, RunConfig, SpectrumSection};

use crate::error::Error;
use crate::evolution::Method;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "STARKMBL_OUTPUT_ROOT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_PHYSICS: i32 = 5;
pub const EXIT_INSUFFICIENT_STATES: i32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Krylov,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Krylov => Method::Krylov,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "starkmbl", version, about = "Stark-potential quench dynamics and spectral diagnostics")]
pub struct Cli {
    /// JSON run configuration; omitted fields take defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run directory. Defaults to <root>/<command>-<config hash prefix>.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Root for default run directories.
    #[arg(long, global = true, env = OUTPUT_ROOT_ENV, default_value = "runs")]
    pub output_root: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker-pool cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// Write data files only.
    #[arg(long, global = true)]
    pub no_plots: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ensemble quenches: HD, imbalance, QFI, correlations.
    Quench(QuenchArgs),
    /// Gap ratios, EEVs, fragments and overlaps from full diagonalization.
    Spectrum(SpectrumArgs),
    /// Single-state dynamics and Fourier spectrum deep in the tilted regime.
    Bloch(BlochArgs),
    /// Energy-window selection of initial product states with audit.
    SelectStates(SelectArgs),
    /// Fast internal consistency checks.
    Selftest,
}

#[derive(Debug, Args)]
pub struct QuenchArgs {
    /// γ/2π values in MHz.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    /// hd, imbalance, qfi, densities, sigmaz, excitations, energy.
    #[arg(long, value_delimiter = ',')]
    pub observables: Option<Vec<String>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub epsilon_target: Option<f64>,
    #[arg(long)]
    pub epsilon_tolerance: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Times (ns) at which C(i,j) is recorded and ξ fitted.
    #[arg(long, value_delimiter = ',')]
    pub correlation_times: Option<Vec<f64>>,
    /// Explicit initial bitstrings instead of selection.
    #[arg(long, value_delimiter = ',')]
    pub states: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_delimiter = ',', conflicts_with = "gamma_scan")]
    pub gamma: Option<Vec<f64>>,
    /// start:stop:step in MHz.
    #[arg(long)]
    pub gamma_scan: Option<String>,
    /// ε window width.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub fragments: bool,
    #[arg(long)]
    pub overlaps: bool,
    /// Ladder sizes for EEV fluctuation scaling.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// dipole and/or imbalance.
    #[arg(long, value_delimiter = ',')]
    pub eev_scaling: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct BlochArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Initial bitstring, highest site first.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Also check that a pure tone at γ lands in the expected bin.
    #[arg(long)]
    pub self_test: bool,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub epsilon_target: Option<f64>,
    #[arg(long)]
    pub epsilon_tolerance: Option<f64>,
    /// Re-audit ε against full-diagonalization extremes.
    #[arg(long)]
    pub audit_ed: bool,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::InvalidArgument(_)
        | Error::InvalidGraph(_)
        | Error::InvalidPotential(_)
        | Error::InvalidTimeGrid(_)
        | Error::WrongPopcount { .. } => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        Error::InsufficientStates { .. } => EXIT_INSUFFICIENT_STATES,
        Error::BasisTooLarge { .. }
        | Error::IndexOutOfRange { .. }
        | Error::DimensionMismatch { .. }
        | Error::ImbalanceUndefined { .. }
        | Error::DimensionOverCap { .. }
        | Error::Eigensolver(_)
        | Error::KrylovNotConverged { .. }
        | Error::LanczosNotConverged { .. }
        | Error::DegenerateSpectrum { .. }
        | Error::SelfTestFailed(_) => EXIT_PHYSICS,
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::DimensionOverCap { .. } = e {
                eprintln!("hint: rerun with --method krylov, or raise dense_cap in the config");
            }
            exit_code(&e)
        }
    }
}

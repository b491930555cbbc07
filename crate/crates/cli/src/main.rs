//! Batch front door for the needle laboratory: parameter sweeps, report
//! emission and plot files. No interactive steering; outputs are
//! byte-identical across runs for identical configurations (timestamps go
//! to a sidecar, never into data files).

mod commands;
mod output;
mod svg;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit code when a run completes but contract-violation flags were raised.
pub const EXIT_FLAGGED: u8 = 2;
/// Exit code for usage errors (bad flags), following the BSD convention.
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "needlelab",
    about = "Gaussian isoperimetry on needles: profiles, deficits, ensembles",
    version
)]
pub struct Cli {
    /// Output directory (default: $NEEDLELAB_OUT or ./out)
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Comma-separated output formats: csv, json, svg
    #[arg(long, global = true, default_value = "csv,json")]
    pub formats: String,

    /// Maximum number of concurrent sweep evaluations
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Model profile tables: unbounded and diameter-bounded, with the gap
    /// bound
    Profile {
        /// Curvature parameter K
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Diameter bounds, comma separated
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        d_list: Vec<f64>,
        /// Number of interior grid points for theta
        #[arg(long, default_value_t = 19)]
        theta_grid: usize,
    },
    /// Single-needle deficit reports for every weight in a family file
    NeedleReport {
        /// Weight family description file (TOML)
        #[arg(long)]
        weights: PathBuf,
        /// Report only the named weight
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        /// Probe grid step for the envelope margins
        #[arg(long, default_value_t = 0.01)]
        grid: f64,
    },
    /// Deficit chain along a hinge intensity family
    DeficitSweep {
        #[arg(long, default_value_t = 0.3)]
        theta: f64,
        /// Kink position of the hinge perturbation
        #[arg(long, default_value_t = 0.0)]
        kink: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05,0.025")]
        intensity_list: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        grid: f64,
    },
    /// Reverse Poincaré ratio along a hinge intensity family, with the
    /// log-log regression slope of the gap against the deficit
    RevpoincareSweep {
        #[arg(long, default_value_t = 0.3)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        kink: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05,0.025")]
        intensity_list: Vec<f64>,
    },
    /// Run the full pipeline on an ensemble description file
    EnsembleRun {
        /// Ensemble description file (TOML)
        #[arg(long)]
        file: PathBuf,
    },
    /// Product-space perturbation sweep
    ProductSim {
        #[arg(long, default_value_t = 16)]
        fibers: usize,
        #[arg(long, default_value_t = 0.3)]
        theta: f64,
        /// Perturbation kind: hinge, flip or offset
        #[arg(long, default_value = "hinge")]
        perturbation: String,
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05")]
        intensity_list: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
        /// Read the whole spec from a TOML file instead of flags
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Reverse log-Sobolev witness scan on a product ensemble, plus
    /// Gaussian-shift Talagrand checks
    LsiWitness {
        #[arg(long, default_value_t = 16)]
        fibers: usize,
        #[arg(long, default_value_t = 0.3)]
        theta: f64,
        #[arg(long, default_value_t = 0.1)]
        intensity: f64,
        /// Rate is lambda = margin / measured_ratio
        #[arg(long, default_value_t = 1.05)]
        lambda_margin: f64,
        #[arg(long, default_value_t = 6.0)]
        sigma: f64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.1,0.11,0.12,0.13,0.14,0.15,0.16,0.17,0.18,0.19,0.2"
        )]
        eps_list: Vec<f64>,
        /// Gaussian shifts for the Talagrand quantile-coupling check
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5")]
        shift_list: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code conventions differ; usage problems are 64
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS // --help / --version
            };
        }
    };
    match commands::run(cli) {
        Ok(flagged) => {
            if flagged {
                eprintln!("needlelab: contract-violation flags were raised (exit 2)");
                ExitCode::from(EXIT_FLAGGED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("needlelab: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

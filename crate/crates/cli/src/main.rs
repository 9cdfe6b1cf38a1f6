//! `ncpath`: verification campaigns for time-sliced noncommutative path integrals.
//!
//! Exit status: 0 when every check passes, 1 on a verification failure,
//! 2 on usage or configuration errors.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ncpath", version, about = "Time-sliced phase-space path integrals with noncommutative coordinates")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
///
/// Precedence, lowest to highest: config file, `--set key=value` in the
/// order given, then the subcommand's own flags (`--alpha`, `--m`, ...).
#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,

    /// Override a config key, e.g. `--set grid.points_per_axis=24`. Values are parsed as JSON, falling back to a string.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Write the CSV (or kernel file) here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    /// Also write a JSON summary of the run.
    #[arg(long, global = true)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// α-symbols of the potential operator V(X + θK) and their deviation from V(x + θk).
    Symbol {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.4,0,0.4")]
        alphas: Vec<f64>,
        /// Largest accepted relative pairwise spread.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Star-product identities on the configured probe.
    StarCheck {
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Emit the full sliced kernel.
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Probe-action spread between α values against the slice count.
    AlphaSweep {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.5,0.5")]
        alphas: Vec<f64>,
        #[arg(long = "m-list", value_delimiter = ',', default_value = "4,8,16,32")]
        m_list: Vec<usize>,
    },
    /// Exact audit of the source-derivative identities.
    PhiAudit {
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Exact rationals: decimals, fractions or exponents.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1/2,0,1/2")]
        alphas: Vec<String>,
    },
    /// The midpoint JJ entry ε²[4a(m-a) + m] at a = m/2 against T².
    #[command(name = "limit-324")]
    Limit324 {
        #[arg(long = "m-list", value_delimiter = ',', default_value = "2,10,100,1000")]
        m_list: Vec<usize>,
        #[arg(long, default_value = "1")]
        time: String,
    },
    /// Sliced evolution against the dense spectral propagator.
    OracleCompare {
        #[arg(long = "m-list", value_delimiter = ',', default_value = "16,32,64")]
        m_list: Vec<usize>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Leave the runtime column out, making the CSV byte-reproducible.
        #[arg(long)]
        omit_runtime: bool,
    },
    /// Norm ratio ‖Kψ‖/‖ψ‖ per slice count.
    Unitarity {
        #[arg(long = "m-list", value_delimiter = ',', default_value = "4,8,16,32")]
        m_list: Vec<usize>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = run::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run::execute(&cli) {
        Ok(run::Status::Pass) => ExitCode::SUCCESS,
        Ok(run::Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

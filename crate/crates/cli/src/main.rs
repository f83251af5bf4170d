//! `gaborlab` command-line experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 hypothesis or parity violation,
//! 3 numerical-diagnostic failure (including claims that did not hold).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gaborlab", version, about = "Sharp Gabor frame bounds on symplectic lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Grid size N (power of two).
    #[arg(long = "N", default_value_t = 2048)]
    pub n: usize,
    /// Grid spacing h.
    #[arg(long = "h", default_value = "1/64")]
    pub h: String,
    /// Janssen truncation K.
    #[arg(long = "K", default_value_t = 20)]
    pub k: usize,
    /// Symbol grid resolution per axis.
    #[arg(long = "grid-n", default_value_t = 256)]
    pub grid_n: usize,
    /// Seed for randomized runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit JSON (sweeps default to CSV, `factor` to text).
    #[arg(long)]
    pub json: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Janssen,
    Zak,
    FiniteSection,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    Auto,
    Even,
    Odd,
    OddDensity2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frame bounds of one window on one lattice.
    Bounds {
        #[arg(long)]
        window: String,
        #[arg(long)]
        lattice: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Finite-section lattice radius.
        #[arg(long, default_value_t = 12.0)]
        radius: f64,
        /// Finite-section Hermite subspace dimension.
        #[arg(long = "n-test", default_value_t = 24)]
        n_test: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Vanishing lower-bound certificates for even and odd windows.
    Certify {
        #[arg(long)]
        window: String,
        #[arg(long, value_enum, default_value_t = Certificate::Auto)]
        certificate: Certificate,
        /// Largest accepted residual.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Odd windows on random symplectic lattices of density (n+1)/n.
    Lyunes {
        #[arg(long = "n-max", default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Frame bounds over a grid of separable lattices αℤ × βℤ.
    Scan {
        #[arg(long)]
        window: String,
        /// `lo:hi` range of α.
        #[arg(long)]
        alpha: String,
        /// `lo:hi` range of β.
        #[arg(long)]
        beta: String,
        /// Points per axis.
        #[arg(long, default_value_t = 9)]
        steps: usize,
        #[arg(long, default_value_t = 12.0)]
        radius: f64,
        #[arg(long = "n-test", default_value_t = 24)]
        n_test: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bounds on a deformed lattice by reduction and directly.
    Deform {
        #[arg(long)]
        window: String,
        /// Lattice before deformation.
        #[arg(long, default_value = "sq:delta=2")]
        lattice: String,
        /// Deformation S as `a,b,c,d` (row-major).
        #[arg(long = "S", alias = "matrix", allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 12.0)]
        radius: f64,
        #[arg(long = "n-test", default_value_t = 64)]
        n_test: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Factor a symplectic matrix into a generator chain.
    Factor {
        /// Matrix as `a,b,c,d` (row-major).
        #[arg(long = "S", alias = "matrix", allow_hyphen_values = true)]
        s: String,
        #[command(flatten)]
        common: Common,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GABORLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("GABORLAB_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("GABORLAB_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let result = match cli.command {
        Command::Bounds { window, lattice, method, radius, n_test, common } => {
            commands::bounds(&common, &window, &lattice, method, radius, n_test)
        }
        Command::Certify { window, certificate, tol, common } => commands::certify(&common, &window, certificate, tol),
        Command::Lyunes { n_max, trials, common } => commands::lyunes(&common, n_max, trials),
        Command::Scan { window, alpha, beta, steps, radius, n_test, common } => {
            commands::scan(&common, &window, &alpha, &beta, steps, radius, n_test)
        }
        Command::Deform { window, lattice, s, radius, n_test, common } => {
            commands::deform(&common, &window, &lattice, &s, radius, n_test)
        }
        Command::Factor { s, common } => commands::factor(&common, &s),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

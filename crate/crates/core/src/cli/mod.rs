//! Command-line front end.
//!
//! Subcommands: `spin-sweep`, `gas-scan`, `ree`, `energy-witness`,
//! `selfcheck`. Output is CSV (floats with 12 significant digits) or JSON,
//! written to `--out` or stdout.
//!
//! Exit codes: 0 ok, 1 selfcheck failure, 2 configuration error, 3 resource
//! cap, 4 numerical failure.

mod commands;
mod config;
mod output;
mod selfcheck;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    run_energy_witness, run_gas_scan, run_ree, run_spin_sweep, scan_fit, FIT_COLUMNS, FIT_SAMPLES, GAS_SCAN_COLUMNS,
    MB_COLUMNS, SPIN_SWEEP_COLUMNS,
};
pub use config::{exit, load_model, load_spectrum, parse_model, CliError, OutputFormat, RunOptions, TempGrid};
pub use output::{format_float, SIG_DIGITS};
pub use selfcheck::{run_selfcheck, run_selfcheck_with, CheckOutcome, SelfcheckReport, SelfcheckTolerances};

#[derive(Debug, Parser)]
#[command(name = "thermowitness", version, about = "Thermal entanglement witnesses for spin chains and ideal gases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Seed for every randomized search.
    #[arg(long, default_value_t = crate::rng::DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Random restarts of the product-state search.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Bisection tolerance (sweeps) or duality-gap tolerance (REE).
    #[arg(long)]
    pub tol: Option<f64>,
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        RunOptions { seed: self.seed, format: self.format, restarts: self.restarts, tol: self.tol }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Witness verdicts over a temperature grid for a spin model.
    SpinSweep {
        /// Spin model JSON file.
        #[arg(long)]
        model: PathBuf,
        /// Temperature grid `lo:hi:count[:log]`.
        #[arg(long)]
        temps: String,
        /// Also compute the conditional-gradient upper bound (E_upper column).
        #[arg(long)]
        upper: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Ideal-gas observables, scaling fit and classical check.
    GasScan {
        /// JSON file or `gen:<linear|uniform>:<modes>:<param>:<stats>:<N=n|mu=m>`.
        #[arg(long)]
        spectrum: String,
        #[arg(long)]
        temps: String,
        /// Fit window `lo:hi`; defaults to a few level spacings up to a tenth of the bandwidth.
        #[arg(long)]
        fit_window: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Relative-entropy-of-entanglement bounds of the ground or thermal state.
    Ree {
        #[arg(long)]
        model: PathBuf,
        /// Use the thermal state at this temperature instead of the ground state.
        #[arg(long)]
        temperature: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Energy compared against the separable minimum.
    EnergyWitness {
        #[arg(long)]
        model: PathBuf,
        /// Use the thermal energy at this temperature instead of the ground energy.
        #[arg(long)]
        temperature: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs the built-in property suite.
    Selfcheck {
        #[arg(long, default_value_t = crate::rng::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a tolerance, `name=value` (testing aid).
        #[arg(long = "tolerance", hide = true)]
        tolerances: Vec<String>,
    },
}

fn parse_window(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("fit window '{s}' is not lo:hi with 0 < lo < hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo > 0.0 && lo < hi && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

fn parse_tolerances(items: &[String]) -> Result<SelfcheckTolerances, CliError> {
    let mut tol = SelfcheckTolerances::default();
    for item in items {
        let bad = || CliError::Config(format!("tolerance override '{item}' is not name=value"));
        let (name, value) = item.split_once('=').ok_or_else(bad)?;
        let value: f64 = value.parse().map_err(|_| bad())?;
        match name {
            "eq3" | "eq3_chain" => tol.eq3 = value,
            "entropy_identity" => tol.entropy_identity = value,
            "gas_derivative" | "gas_entropy_derivative" => tol.gas_derivative = value,
            _ => return Err(CliError::Config(format!("unknown tolerance '{name}'"))),
        }
    }
    Ok(tol)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Executes a parsed command and returns the process exit code. Diagnostics
/// go to stderr.
pub fn execute(command: Command) -> i32 {
    let result = match command {
        Command::Selfcheck { seed, out, tolerances } => {
            return match parse_tolerances(&tolerances) {
                Ok(tol) => {
                    let report = run_selfcheck_with(seed, &tol);
                    match emit(&report.render(), out.as_ref()) {
                        Ok(()) if report.passed() => exit::OK,
                        Ok(()) => exit::SELFCHECK_FAILED,
                        Err(e) => {
                            eprintln!("error: {e}");
                            e.exit_code()
                        }
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            };
        }
        Command::SpinSweep { model, temps, upper, common } => (|| {
            let spec = load_model(&model)?;
            let grid: TempGrid = temps.parse()?;
            let text = run_spin_sweep(&spec, &grid, &common.options(), upper)?;
            emit(&text, common.out.as_ref())
        })(),
        Command::GasScan { spectrum, temps, fit_window, common } => (|| {
            let spectrum = load_spectrum(&spectrum)?;
            let grid: TempGrid = temps.parse()?;
            let window = fit_window.as_deref().map(parse_window).transpose()?;
            let text = run_gas_scan(&spectrum, &grid, &common.options(), window)?;
            emit(&text, common.out.as_ref())
        })(),
        Command::Ree { model, temperature, common } => (|| {
            let spec = load_model(&model)?;
            let text = run_ree(&spec, temperature, &common.options())?;
            emit(&text, common.out.as_ref())
        })(),
        Command::EnergyWitness { model, temperature, common } => (|| {
            let spec = load_model(&model)?;
            let text = run_energy_witness(&spec, temperature, &common.options())?;
            emit(&text, common.out.as_ref())
        })(),
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Argument
/// errors exit with the configuration code; `--help` and `--version` with 0.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                exit::CONFIG
            } else {
                exit::OK
            }
        }
    }
}

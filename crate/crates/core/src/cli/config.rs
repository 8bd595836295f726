//! Run configuration: temperature grids, model and spectrum sources.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::Error;
use crate::models::{make_spectrum, ModeSpectrum, ParticleConstraint, SpectrumKind, SpinModelSpec, Statistics};
use crate::rng::DEFAULT_SEED;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const SELFCHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const RESOURCE_CAP: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

/// Failure of a CLI run, classified by exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource cap: {0}")]
    ResourceCap(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::ResourceCap(_) => exit::RESOURCE_CAP,
            CliError::Numerical(_) => exit::NUMERICAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::DimensionCap { .. } => CliError::ResourceCap(msg),
            Error::InvalidDims(_)
            | Error::DimensionMismatch { .. }
            | Error::SiteOutOfRange { .. }
            | Error::InvalidPartition(_)
            | Error::InvalidTemperature(_)
            | Error::InvalidParameter(_)
            | Error::Domain(_) => CliError::Config(msg),
            Error::NotHermitian { .. }
            | Error::NotDensity(_)
            | Error::NotNormalized { .. }
            | Error::NoConvergence(_)
            | Error::Invariant(_) => CliError::Numerical(msg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// `lo:hi:count[:log]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TempGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl TempGrid {
    pub fn new(lo: f64, hi: f64, count: usize, log: bool) -> Result<Self, CliError> {
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(CliError::Config(format!("temperatures must be positive and finite ({lo}:{hi})")));
        }
        if count == 0 {
            return Err(CliError::Config("temperature grid needs count >= 1".into()));
        }
        if !(lo < hi) {
            return Err(CliError::Config(format!("temperature grid needs lo < hi, got {lo}:{hi}")));
        }
        Ok(TempGrid { lo, hi, count, log })
    }

    /// Ascending grid points; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == self.count - 1 {
                    return self.hi;
                }
                let f = i as f64 / last;
                if self.log {
                    (self.lo.ln() + f * (self.hi / self.lo).ln()).exp()
                } else {
                    self.lo + f * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

impl FromStr for TempGrid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("temperature grid '{s}' is not lo:hi:count[:log]"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        TempGrid::new(lo, hi, count, log)
    }
}

fn json_error(what: &str, path: &Path, e: serde_json::Error) -> CliError {
    CliError::Config(format!(
        "invalid {what} JSON in {} at line {}, column {}: {e}",
        path.display(),
        e.line(),
        e.column()
    ))
}

fn read_file(what: &str, path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {what} file {}: {e}", path.display())))
}

/// Parses a spin-model JSON document.
pub fn parse_model(text: &str, path: &Path) -> Result<SpinModelSpec, CliError> {
    serde_json::from_str(text).map_err(|e| json_error("model", path, e))
}

pub fn load_model(path: &Path) -> Result<SpinModelSpec, CliError> {
    parse_model(&read_file("model", path)?, path)
}

/// On-disk spectrum: a generator plus statistics and exactly one of
/// `particles` or `mu`.
#[derive(Debug, Deserialize)]
struct SpectrumFile {
    #[serde(flatten)]
    kind: SpectrumKind,
    statistics: Statistics,
    #[serde(default, alias = "N")]
    particles: Option<f64>,
    #[serde(default)]
    mu: Option<f64>,
}

fn constraint_of(particles: Option<f64>, mu: Option<f64>) -> Result<ParticleConstraint, CliError> {
    match (particles, mu) {
        (Some(n), None) => Ok(ParticleConstraint::Number(n)),
        (None, Some(mu)) => Ok(ParticleConstraint::ChemicalPotential(mu)),
        (None, None) => {
            Err(CliError::Config("spectrum needs a particle number (N) or a chemical potential (mu)".into()))
        }
        (Some(_), Some(_)) => Err(CliError::Config("spectrum sets both N and mu; give exactly one".into())),
    }
}

fn parse_statistics(s: &str) -> Result<Statistics, CliError> {
    match s {
        "bose" => Ok(Statistics::Bose),
        "fermi" => Ok(Statistics::Fermi),
        "boltzmann" => Ok(Statistics::Boltzmann),
        _ => Err(CliError::Config(format!("unknown statistics '{s}' (bose, fermi, boltzmann)"))),
    }
}

/// `gen:<linear|uniform>:<modes>:<c|omega>:<stats>:<N=n|mu=m>`.
fn parse_generator(spec: &str) -> Result<ModeSpectrum, CliError> {
    let bad = |why: &str| CliError::Config(format!("spectrum generator '{spec}': {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 6 || parts[0] != "gen" {
        return Err(bad("expected gen:<linear|uniform>:<modes>:<param>:<stats>:<N=n|mu=m>"));
    }
    let modes: usize = parts[2].parse().map_err(|_| bad("modes must be a positive integer"))?;
    let param: f64 = parts[3].parse().map_err(|_| bad("frequency parameter must be a number"))?;
    let kind = match parts[1] {
        "linear" | "linear_dispersion" => SpectrumKind::LinearDispersion { modes, c: param },
        "uniform" => SpectrumKind::Uniform { modes, omega: param },
        other => return Err(bad(&format!("unknown generator '{other}'"))),
    };
    let stats = parse_statistics(parts[4])?;
    let (key, value) = parts[5].split_once('=').ok_or_else(|| bad("constraint must be N=<n> or mu=<m>"))?;
    let value: f64 = value.parse().map_err(|_| bad("constraint value must be a number"))?;
    let constraint = match key {
        "N" | "n" => constraint_of(Some(value), None)?,
        "mu" => constraint_of(None, Some(value))?,
        _ => return Err(bad("constraint must be N=<n> or mu=<m>")),
    };
    Ok(make_spectrum(&kind, stats, constraint)?)
}

/// Resolves `--spectrum`: a `gen:` string or a JSON file path.
pub fn load_spectrum(spec: &str) -> Result<ModeSpectrum, CliError> {
    if spec.starts_with("gen:") {
        return parse_generator(spec);
    }
    let path = PathBuf::from(spec);
    let text = read_file("spectrum", &path)?;
    let file: SpectrumFile = serde_json::from_str(&text).map_err(|e| json_error("spectrum", &path, e))?;
    let constraint = constraint_of(file.particles, file.mu)?;
    Ok(make_spectrum(&file.kind, file.statistics, constraint)?)
}

/// Everything a subcommand needs besides its input source.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub format: OutputFormat,
    pub restarts: Option<usize>,
    pub tol: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: DEFAULT_SEED, format: OutputFormat::Csv, restarts: None, tol: None }
    }
}

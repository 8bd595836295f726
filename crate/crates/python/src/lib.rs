//! Python bindings for the thermal entanglement witness library.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use thermowitness::cli::{exit, run_selfcheck, CliError};
use thermowitness::ent::{energy_witness, ree_lower_bound, ree_upper_bound, FrankWolfeConfig, ProductSearch};
use thermowitness::gas::{self, omega_tilde_g};
use thermowitness::models::{
    build_spin_hamiltonian, ground_state, Boundary, ModeSpectrum, ParticleConstraint, SpinModelKind, SpinModelSpec,
    Statistics, DEFAULT_DEGENERACY_TOL,
};
use thermowitness::qops::HermitianOperator;
use thermowitness::thermo::CanonicalScalars;
use thermowitness::witness::{self, SweepSettings};

/// Configuration problems become `ValueError`, everything else `RuntimeError`.
fn to_py(e: impl Into<CliError>) -> PyErr {
    let e = e.into();
    match e.exit_code() {
        exit::CONFIG => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<SpinModelKind> {
    match kind {
        "heisenberg" => Ok(SpinModelKind::Heisenberg),
        "xy" => Ok(SpinModelKind::Xy),
        "transverse_ising" => Ok(SpinModelKind::TransverseIsing),
        _ => Err(PyValueError::new_err(format!("unknown model kind {kind:?}"))),
    }
}

fn parse_boundary(boundary: &str) -> PyResult<Boundary> {
    match boundary {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        _ => Err(PyValueError::new_err(format!("unknown boundary {boundary:?}"))),
    }
}

fn parse_statistics(stats: &str) -> PyResult<Statistics> {
    match stats {
        "bose" => Ok(Statistics::Bose),
        "fermi" => Ok(Statistics::Fermi),
        "boltzmann" => Ok(Statistics::Boltzmann),
        _ => Err(PyValueError::new_err(format!("unknown statistics {stats:?}"))),
    }
}

/// Witness verdicts at one temperature.
#[pyclass(get_all, frozen, skip_from_py_object, module = "pythermowitness")]
#[derive(Clone)]
struct WitnessReport {
    temperature: f64,
    entropy: f64,
    p: f64,
    neg_ln_p: f64,
    e_lower: f64,
    e_upper: Option<f64>,
    eq2_fires: bool,
    eq4_fires: bool,
}

#[pymethods]
impl WitnessReport {
    fn __repr__(&self) -> String {
        format!(
            "WitnessReport(T={}, S={}, neg_ln_p={}, E_lower={}, eq2={}, eq4={})",
            self.temperature, self.entropy, self.neg_ln_p, self.e_lower, self.eq2_fires, self.eq4_fires
        )
    }
}

impl From<&witness::WitnessReport> for WitnessReport {
    fn from(r: &witness::WitnessReport) -> Self {
        WitnessReport {
            temperature: r.temperature,
            entropy: r.entropy,
            p: r.p,
            neg_ln_p: r.neg_ln_p,
            e_lower: r.e_lower,
            e_upper: r.e_upper,
            eq2_fires: r.eq2_fires,
            eq4_fires: r.eq4_fires,
        }
    }
}

#[pyclass(get_all, frozen, module = "pythermowitness")]
struct SweepResult {
    reports: Vec<WitnessReport>,
    t_star_eq2: Option<f64>,
    t_star_eq4: Option<f64>,
    ground_energy: f64,
}

/// A qubit chain Hamiltonian.
#[pyclass(frozen, module = "pythermowitness")]
struct SpinModel {
    spec: SpinModelSpec,
    h: HermitianOperator,
}

#[pymethods]
impl SpinModel {
    #[new]
    #[pyo3(signature = (kind, n_sites, coupling = 1.0, field = 0.0, boundary = "open"))]
    fn new(kind: &str, n_sites: usize, coupling: f64, field: f64, boundary: &str) -> PyResult<Self> {
        let spec = SpinModelSpec::new(parse_kind(kind)?, n_sites, coupling, field, parse_boundary(boundary)?);
        let h = build_spin_hamiltonian(&spec).map_err(to_py)?;
        Ok(SpinModel { spec, h })
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.spec.n_sites
    }

    /// Ascending eigenvalues.
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        Ok(thermowitness::qops::eig_hermitian(&self.h).map_err(to_py)?.eigenvalues.to_vec())
    }

    /// Evaluates both witness forms over an ascending temperature grid.
    #[pyo3(signature = (temperatures, upper = false))]
    fn sweep(&self, py: Python<'_>, temperatures: Vec<f64>, upper: bool) -> PyResult<SweepResult> {
        let settings = SweepSettings { compute_upper: upper, ..SweepSettings::default() };
        let r = py.detach(|| witness::sweep(&self.h, &temperatures, &settings)).map_err(to_py)?;
        Ok(SweepResult {
            reports: r.reports.iter().map(WitnessReport::from).collect(),
            t_star_eq2: r.t_star_eq2,
            t_star_eq4: r.t_star_eq4,
            ground_energy: r.ground_energy,
        })
    }

    /// `(lower, upper)` bracket on the ground state's relative entropy of
    /// entanglement.
    #[pyo3(signature = (restarts = 8))]
    fn ree_bounds(&self, py: Python<'_>, restarts: usize) -> PyResult<(f64, f64)> {
        py.detach(|| {
            let gs = ground_state(&self.h, DEFAULT_DEGENERACY_TOL)?;
            let lower = ree_lower_bound(&gs.state)?.lower;
            let config = FrankWolfeConfig {
                search: ProductSearch { restarts, ..ProductSearch::default() },
                ..FrankWolfeConfig::default()
            };
            let upper = ree_upper_bound(&gs.state.projector(), &config)?.upper.unwrap_or(f64::INFINITY);
            Ok::<_, thermowitness::Error>((lower, upper))
        })
        .map_err(to_py)
    }

    /// `(sep_min, entangled)`: the smallest product-state energy and whether
    /// `energy` lies strictly below it.
    fn energy_witness(&self, py: Python<'_>, energy: f64) -> (f64, bool) {
        let w = py.detach(|| energy_witness(&self.h, energy, &ProductSearch::default()));
        (w.sep_min, w.entangled)
    }
}

#[pyclass(get_all, frozen, module = "pythermowitness")]
struct GasState {
    temperature: f64,
    mu: f64,
    entropy: f64,
    free_energy: f64,
    n_actual: f64,
    occupations: Vec<f64>,
}

#[pyclass(get_all, frozen, module = "pythermowitness")]
struct ScalingFit {
    exponent: f64,
    omega_tilde: f64,
    r_squared: f64,
    t_window: (f64, f64),
}

/// Free single-particle modes with a particle-number target or a fixed
/// chemical potential.
#[pyclass(frozen, module = "pythermowitness")]
struct GasSpectrum {
    spectrum: ModeSpectrum,
}

#[pymethods]
impl GasSpectrum {
    #[new]
    #[pyo3(signature = (frequencies, statistics, particles = None, mu = None))]
    fn new(frequencies: Vec<f64>, statistics: &str, particles: Option<f64>, mu: Option<f64>) -> PyResult<Self> {
        let constraint = match (particles, mu) {
            (Some(n), None) => ParticleConstraint::Number(n),
            (None, Some(mu)) => ParticleConstraint::ChemicalPotential(mu),
            _ => return Err(PyValueError::new_err("give exactly one of particles or mu")),
        };
        let spectrum = ModeSpectrum::new(frequencies, parse_statistics(statistics)?, constraint).map_err(to_py)?;
        Ok(GasSpectrum { spectrum })
    }

    fn state(&self, temperature: f64) -> PyResult<GasState> {
        let s = gas::GasState::resolve(&self.spectrum, temperature).map_err(to_py)?;
        Ok(GasState {
            temperature: s.temperature,
            mu: s.mu,
            entropy: s.entropy,
            free_energy: s.free_energy,
            n_actual: s.n_actual,
            occupations: s.occupations,
        })
    }

    /// Power-law fit of the entropy over `window`, or the default window.
    #[pyo3(signature = (window = None))]
    fn fit(&self, window: Option<(f64, f64)>) -> PyResult<ScalingFit> {
        let f = thermowitness::cli::scan_fit(&self.spectrum, window).map_err(to_py)?;
        Ok(ScalingFit {
            exponent: f.exponent,
            omega_tilde: f.omega_tilde,
            r_squared: f.r_squared,
            t_window: f.t_window,
        })
    }

    /// Geometric-mean frequency scale per particle.
    fn omega_tilde_g(&self, particles: f64) -> f64 {
        omega_tilde_g(&self.spectrum, particles)
    }
}

/// `(S, -ln p, F, U)` of a canonical ensemble with ascending levels.
#[pyfunction]
fn canonical_scalars(levels: Vec<f64>, temperature: f64) -> PyResult<(f64, f64, f64, f64)> {
    let s = CanonicalScalars::new(&levels, temperature).map_err(to_py)?;
    Ok((s.entropy, s.neg_ln_ground_weight(), s.free_energy, s.internal_energy))
}

/// `(passed, report)` of the built-in consistency checks.
#[pyfunction]
#[pyo3(signature = (seed = 42))]
fn selfcheck(py: Python<'_>, seed: u64) -> (bool, String) {
    let r = py.detach(|| run_selfcheck(seed));
    (r.passed(), r.render())
}

#[pymodule]
fn pythermowitness(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SpinModel>()?;
    m.add_class::<SweepResult>()?;
    m.add_class::<WitnessReport>()?;
    m.add_class::<GasSpectrum>()?;
    m.add_class::<GasState>()?;
    m.add_class::<ScalingFit>()?;
    m.add_function(wrap_pyfunction!(canonical_scalars, m)?)?;
    m.add_function(wrap_pyfunction!(selfcheck, m)?)?;
    Ok(())
}

//! Thermal entanglement witnesses.
//!
//! With `p` the Boltzmann weight of the ground state `|Ψ₀⟩`, `S` the thermal
//! entropy and `E` a lower bound on the relative entropy of entanglement of
//! `|Ψ₀⟩`, the thermal state is certified entangled when
//!
//! * `−ln p < E` (the weight form), or
//! * `S < E` (the entropy form, implied-by direction: `−ln p ≤ S`).
//!
//! Both comparisons are strict with a 1e−12 guard band. Temperatures are in
//! energy units (`k_B = 1`), entropies in nats.

use std::sync::Arc;

use rayon::prelude::*;

use crate::ent::{ree_lower_bound, ree_upper_bound, EntanglementEstimate, FrankWolfeConfig};
use crate::error::{Error, Result};
use crate::models::{ground_state_from_spectrum, DEFAULT_DEGENERACY_TOL};
use crate::qops::{eig_hermitian, HermitianOperator};
use crate::thermo::{thermal_ensemble, CanonicalScalars};

const GUARD: f64 = 1e-12;
/// Bracket expansion stops here.
pub const MAX_BRACKET_TEMPERATURE: f64 = 1e6;

/// Per-temperature verdicts of both witness forms.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub temperature: f64,
    pub entropy: f64,
    pub p: f64,
    pub neg_ln_p: f64,
    pub e_lower: f64,
    pub e_upper: Option<f64>,
    pub eq2_fires: bool,
    pub eq4_fires: bool,
    pub ground_degeneracy: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `−ln p < E`
    Eq2,
    /// `S < E`
    Eq4,
}

fn report_from_scalars(s: &CanonicalScalars, degeneracy: usize, e: &EntanglementEstimate) -> Result<WitnessReport> {
    let neg_ln_p = s.neg_ln_ground_weight();
    if neg_ln_p > s.entropy + 1e-9 {
        return Err(Error::Invariant(format!("-ln p = {neg_ln_p} exceeds S = {} at T = {}", s.entropy, s.temperature)));
    }
    let eq2_fires = neg_ln_p < e.lower - GUARD;
    let eq4_fires = s.entropy < e.lower - GUARD;
    if eq4_fires && !eq2_fires {
        return Err(Error::Invariant(format!(
            "entropy witness fired without the weight witness at T = {}",
            s.temperature
        )));
    }
    Ok(WitnessReport {
        temperature: s.temperature,
        entropy: s.entropy,
        p: s.ground_weight,
        neg_ln_p,
        e_lower: e.lower,
        e_upper: e.upper,
        eq2_fires,
        eq4_fires,
        ground_degeneracy: degeneracy,
    })
}

/// Evaluates both witness forms at one temperature. `e_value.lower` must bound
/// the ground state's relative entropy of entanglement from below.
pub fn evaluate_witness(
    h: &HermitianOperator,
    temperature: f64,
    e_value: &EntanglementEstimate,
) -> Result<WitnessReport> {
    let ens = thermal_ensemble(h, temperature)?;
    report_from_scalars(ens.scalars(), ens.ground_degeneracy(), e_value)
}

fn quantity(levels: &[f64], kind: WitnessKind, t: f64) -> Result<f64> {
    let s = CanonicalScalars::new(levels, t)?;
    Ok(match kind {
        WitnessKind::Eq2 => s.neg_ln_ground_weight(),
        WitnessKind::Eq4 => s.entropy,
    })
}

/// Temperature at which the chosen witness stops firing, found by bisection on
/// the monotone quantity (`S` or `−ln p`) minus `e_lower`.
///
/// Returns `None` when `e_lower ≤ 0`, when the witness already fails at
/// `bracket.0` (e.g. a degenerate ground level with `ln g ≥ e_lower`), or when
/// it still fires at [`MAX_BRACKET_TEMPERATURE`] after expanding the bracket.
pub fn critical_temperature(
    h: &HermitianOperator,
    kind: WitnessKind,
    e_lower: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<Option<f64>> {
    let spectral = eig_hermitian(h)?;
    critical_temperature_from_levels(&spectral.eigenvalues, kind, e_lower, bracket, tol)
}

/// As [`critical_temperature`] for an ascending list of energy levels.
pub fn critical_temperature_from_levels(
    levels: &[f64],
    kind: WitnessKind,
    e_lower: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<Option<f64>> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("invalid bracket ({lo}, {hi}) or tolerance {tol}")));
    }
    if !(e_lower > 0.0) {
        return Ok(None);
    }
    if quantity(levels, kind, lo)? >= e_lower {
        return Ok(None);
    }
    while quantity(levels, kind, hi)? < e_lower {
        if hi >= MAX_BRACKET_TEMPERATURE {
            return Ok(None);
        }
        lo = hi;
        hi = (hi * 2.0).min(MAX_BRACKET_TEMPERATURE);
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if quantity(levels, kind, mid)? < e_lower {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSettings {
    /// Also run the conditional-gradient upper bound (diagnostic only).
    pub compute_upper: bool,
    pub frank_wolfe: FrankWolfeConfig,
    /// Bisection tolerance for the critical temperatures.
    pub tol: f64,
    pub degeneracy_tol: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            compute_upper: false,
            frank_wolfe: FrankWolfeConfig::default(),
            tol: 1e-9,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub reports: Vec<WitnessReport>,
    pub t_star_eq2: Option<f64>,
    pub t_star_eq4: Option<f64>,
    pub ground_energy: f64,
    pub estimate: EntanglementEstimate,
}

/// Evaluates both witnesses over an ascending temperature grid. The
/// Hamiltonian is diagonalized once and the ground-state bounds are reused at
/// every temperature.
pub fn sweep(h: &HermitianOperator, temperatures: &[f64], settings: &SweepSettings) -> Result<SweepResult> {
    if temperatures.is_empty() {
        return Err(Error::InvalidParameter("empty temperature grid".into()));
    }
    if let Some(&t) = temperatures.iter().find(|&&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidTemperature(t));
    }
    if temperatures.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("temperature grid must be ascending".into()));
    }

    let spectral = Arc::new(eig_hermitian(h)?);
    let gs = ground_state_from_spectrum(&spectral, h.dims(), settings.degeneracy_tol)?;
    let mut estimate = ree_lower_bound(&gs.state)?;
    if settings.compute_upper {
        let upper = ree_upper_bound(&gs.state.projector(), &settings.frank_wolfe)?;
        estimate.upper = upper.upper;
    }

    let levels = &spectral.eigenvalues;
    let reports = temperatures
        .par_iter()
        .map(|&t| report_from_scalars(&CanonicalScalars::new(levels, t)?, gs.degeneracy, &estimate))
        .collect::<Result<Vec<_>>>()?;

    let width = levels[levels.len() - 1] - levels[0];
    let (t_star_eq2, t_star_eq4) = if width > 0.0 {
        let t_max = temperatures[temperatures.len() - 1];
        let bracket = (1e-6 * width, t_max.max(width));
        (
            critical_temperature_from_levels(levels, WitnessKind::Eq2, estimate.lower, bracket, settings.tol)?,
            critical_temperature_from_levels(levels, WitnessKind::Eq4, estimate.lower, bracket, settings.tol)?,
        )
    } else {
        (None, None)
    };
    if let (Some(t2), Some(t4)) = (t_star_eq2, t_star_eq4) {
        if t4 > t2 + 1e-6 {
            return Err(Error::Invariant(format!("T*_eq4 = {t4} exceeds T*_eq2 = {t2}")));
        }
    }
    Ok(SweepResult { reports, t_star_eq2, t_star_eq4, ground_energy: gs.energy, estimate })
}

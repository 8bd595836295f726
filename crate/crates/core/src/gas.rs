//! Ideal quantum gases over a set of single-particle modes.
//!
//! Grand-canonical occupations `nᵢ = 1/(e^{β(ωᵢ−μ)} ∓ 1)` (upper sign bosons),
//! the per-mode entropy, the grand potential `F = ±T Σᵢ ln(1 ∓ e^{β(μ−ωᵢ)})`,
//! low-temperature power-law fits `S ≈ N (T/ω̃)^p`, and the classical
//! Maxwell–Boltzmann entropy estimate.
//!
//! Two characteristic frequencies appear and are kept apart: `omega_tilde`
//! comes from the scaling fit, `omega_tilde_g` is the logarithmic mean
//! `exp(Σ ln ωᵢ / N)` used in the classical regime.

use crate::error::{Error, Result};
use crate::models::{ModeSpectrum, ParticleConstraint, Statistics};

pub const MIN_FIT_SAMPLES: usize = 8;
const MU_TOL: f64 = 1e-10;
const MU_MAX_ITER: usize = 2000;

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTemperature(t))
    }
}

fn occupation_unchecked(x: f64, stats: Statistics) -> f64 {
    match stats {
        Statistics::Bose => 1.0 / x.exp_m1(),
        Statistics::Fermi => {
            if x > 0.0 {
                let e = (-x).exp();
                e / (1.0 + e)
            } else {
                1.0 / (x.exp() + 1.0)
            }
        }
        Statistics::Boltzmann => (-x).exp(),
    }
}

/// Mean occupation of a mode of frequency `omega`.
pub fn occupation(omega: f64, mu: f64, t: f64, stats: Statistics) -> Result<f64> {
    check_temperature(t)?;
    if stats == Statistics::Bose && mu >= omega {
        return Err(Error::Domain(format!("bose occupation diverges for mu = {mu} >= omega = {omega}")));
    }
    Ok(occupation_unchecked((omega - mu) / t, stats))
}

/// Entropy contribution of one mode with occupation `n`, with `0 ln 0 = 0`.
pub fn mode_entropy(n: f64, stats: Statistics) -> f64 {
    if !(n > 0.0) {
        return 0.0;
    }
    match stats {
        // (1+n) ln(1+n) − n ln n
        Statistics::Bose => n.ln_1p() + n * (1.0 / n).ln_1p(),
        Statistics::Fermi => {
            let n = n.min(1.0);
            let particle = -n * n.ln();
            // −(1−n) ln(1−n), accurate for small n
            let hole = if n < 1.0 { -(1.0 - n) * (-n).ln_1p() } else { 0.0 };
            particle + hole
        }
        Statistics::Boltzmann => n * (1.0 - n.ln()),
    }
}

/// Entropy of one mode at reduced energy `x = (ω − μ)/T`. Exact in the tails
/// where the occupation itself loses digits.
fn mode_entropy_at(x: f64, stats: Statistics) -> f64 {
    match stats {
        // x n − ln(1 − e^{−x})
        Statistics::Bose => {
            let log_hole = if x < 1.0 { (-(-x).exp_m1()).ln() } else { (-(-x).exp()).ln_1p() };
            x / x.exp_m1() - log_hole
        }
        // symmetric under x → −x: ln(1 + e^{−|x|}) + |x| / (e^{|x|} + 1)
        Statistics::Fermi => {
            let a = x.abs();
            let e = (-a).exp();
            e.ln_1p() + a * e / (1.0 + e)
        }
        Statistics::Boltzmann => (-x).exp() * (1.0 + x),
    }
}

/// `ln(1 + e^y)` without overflow.
fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// Grand potential `F(T, μ)` summed over modes.
pub fn grand_potential(frequencies: &[f64], stats: Statistics, mu: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    let mut total = 0.0;
    for &w in frequencies {
        let x = (w - mu) / t;
        total += match stats {
            Statistics::Bose => {
                if !(x > 0.0) {
                    return Err(Error::Domain(format!(
                        "bose grand potential requires mu < omega (mu = {mu}, omega = {w})"
                    )));
                }
                t * (-(-x).exp_m1()).ln()
            }
            Statistics::Fermi => -t * softplus(-x),
            Statistics::Boltzmann => -t * (-x).exp(),
        };
    }
    Ok(total)
}

fn particle_number(frequencies: &[f64], stats: Statistics, mu: f64, t: f64) -> f64 {
    frequencies.iter().map(|&w| occupation_unchecked((w - mu) / t, stats)).sum()
}

/// Chemical potential giving mean particle number `n` at temperature `t`.
pub fn solve_mu(spectrum: &ModeSpectrum, n: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("particle number {n} must be positive")));
    }
    let freqs = spectrum.frequencies();
    let stats = spectrum.statistics();
    let (w_min, w_max) = (spectrum.min_frequency(), spectrum.max_frequency());
    let m = freqs.len() as f64;

    let (mut lo, mut hi) = match stats {
        Statistics::Boltzmann => {
            // N = e^{βμ} Σ e^{−βω} inverts in closed form.
            let ln_sum = freqs.iter().map(|&w| (-(w - w_min) / t).exp()).sum::<f64>().ln();
            return Ok(t * n.ln() + w_min - t * ln_sum);
        }
        Statistics::Fermi => {
            if n >= m {
                return Err(Error::Domain(format!(
                    "Pauli bound: {n} fermions cannot occupy {} modes (need N < M)",
                    freqs.len()
                )));
            }
            (-1e6 * w_max, 1e6 * w_max)
        }
        Statistics::Bose => (-1e6 * w_max, w_min - 1e-12),
    };
    let count = |mu: f64| particle_number(freqs, stats, mu, t);
    if count(hi) < n {
        return Err(Error::NoConvergence(format!(
            "particle target {n} exceeds the bracket maximum {} at T = {t}",
            count(hi)
        )));
    }
    let mut collapsed = false;
    for _ in 0..MU_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            collapsed = true;
            break;
        }
        let c = count(mid);
        if c == n {
            return Ok(mid);
        }
        if c < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (c_lo, c_hi) = (count(lo), count(hi));
    let (mu, err) = if (c_lo - n).abs() <= (c_hi - n).abs() { (lo, c_lo - n) } else { (hi, c_hi - n) };
    // Adjacent doubles bracket the root: this is the closest representable mu,
    // even when N(mu) is too steep (near condensation) to meet MU_TOL.
    if err.abs() <= MU_TOL || (collapsed && err.is_finite()) {
        Ok(mu)
    } else {
        Err(Error::NoConvergence(format!("mu bisection stalled with particle-number error {err:e}")))
    }
}

/// Resolved grand-canonical state of a mode spectrum at one temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct GasState {
    pub spectrum: ModeSpectrum,
    pub temperature: f64,
    pub mu: f64,
    pub occupations: Vec<f64>,
    pub entropy: f64,
    pub free_energy: f64,
    pub n_actual: f64,
}

impl GasState {
    /// Uses the spectrum's own constraint: a fixed `μ`, or a particle target
    /// solved for `μ`.
    pub fn resolve(spectrum: &ModeSpectrum, t: f64) -> Result<Self> {
        let mu = match spectrum.constraint() {
            ParticleConstraint::ChemicalPotential(mu) => mu,
            ParticleConstraint::Number(n) => solve_mu(spectrum, n, t)?,
        };
        Self::at_mu(spectrum, mu, t)
    }

    /// State at an explicitly given chemical potential.
    pub fn at_mu(spectrum: &ModeSpectrum, mu: f64, t: f64) -> Result<Self> {
        check_temperature(t)?;
        let stats = spectrum.statistics();
        let occupations =
            spectrum.frequencies().iter().map(|&w| occupation(w, mu, t, stats)).collect::<Result<Vec<_>>>()?;
        let entropy = spectrum.frequencies().iter().map(|&w| mode_entropy_at((w - mu) / t, stats)).sum();
        let free_energy = grand_potential(spectrum.frequencies(), stats, mu, t)?;
        let n_actual = occupations.iter().sum();
        Ok(GasState { spectrum: spectrum.clone(), temperature: t, mu, occupations, entropy, free_energy, n_actual })
    }
}

/// `S = Σᵢ s(nᵢ)` with the Bose, Fermi or classical per-mode entropy.
pub fn gas_entropy(state: &GasState) -> f64 {
    state.entropy
}

pub fn gas_free_energy(state: &GasState) -> f64 {
    state.free_energy
}

/// Power-law fit `S ≈ N (T/ω̃)^p` in log-log coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub omega_tilde: f64,
    pub r_squared: f64,
    pub t_window: (f64, f64),
    /// Particle number the fitted entropy was normalized by.
    pub n_ref: f64,
}

/// Least-squares line through `(ln T, ln S)`; `omega_tilde` is where the
/// fitted `S/n_ref` reaches 1.
pub fn fit_power_law(temperatures: &[f64], entropies: &[f64], n_ref: f64) -> Result<ScalingFit> {
    if temperatures.len() != entropies.len() {
        return Err(Error::DimensionMismatch { expected: temperatures.len(), actual: entropies.len() });
    }
    if temperatures.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "{} samples in the fit window, need at least {MIN_FIT_SAMPLES}",
            temperatures.len()
        )));
    }
    if let Some(&t) = temperatures.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::InvalidTemperature(t));
    }
    if let Some(&s) = entropies.iter().find(|&&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::Domain(format!("entropy sample {s} is not positive")));
    }
    if !(n_ref > 0.0) {
        return Err(Error::InvalidParameter(format!("reference particle number {n_ref}")));
    }
    let xs: Vec<f64> = temperatures.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = entropies.iter().map(|s| s.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter("fit temperatures are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if !(slope > 0.0) {
        return Err(Error::Domain(format!("entropy does not grow with temperature (slope {slope})")));
    }
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    let (t_lo, t_hi) = temperatures.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    Ok(ScalingFit {
        exponent: slope,
        omega_tilde: ((n_ref.ln() - intercept) / slope).exp(),
        r_squared,
        t_window: (t_lo, t_hi),
        n_ref,
    })
}

/// `[5δω, 0.1·ω_max]`, where `δω` is the smallest gap between distinct
/// frequencies (or the lowest frequency when all coincide). Below a few
/// spacings the discreteness of the spectrum bends the log-log curve.
pub fn default_fit_window(spectrum: &ModeSpectrum) -> (f64, f64) {
    let f = spectrum.frequencies();
    let w_max = spectrum.max_frequency();
    let spacing = f.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > 1e-12 * w_max).fold(f64::INFINITY, f64::min);
    let spacing = if spacing.is_finite() { spacing } else { spectrum.min_frequency() };
    (5.0 * spacing, 0.1 * w_max)
}

/// Fits `ln S` against `ln T` over the samples inside `window` (the default
/// window when `None`).
///
/// The normalizing `N` is the particle target when the spectrum has one,
/// otherwise the mean particle number at the hottest sample in the window.
pub fn fit_entropy_scaling(spectrum: &ModeSpectrum, samples: &[f64], window: Option<(f64, f64)>) -> Result<ScalingFit> {
    if samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("temperature samples must be ascending".into()));
    }
    let (lo, hi) = window.unwrap_or_else(|| default_fit_window(spectrum));
    let slack = 1e-12 * hi.abs();
    let ts: Vec<f64> = samples.iter().copied().filter(|&t| t >= lo - slack && t <= hi + slack).collect();
    if ts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "{} samples in the fit window [{lo}, {hi}], need at least {MIN_FIT_SAMPLES}",
            ts.len()
        )));
    }
    let states = ts.iter().map(|&t| GasState::resolve(spectrum, t)).collect::<Result<Vec<_>>>()?;
    let entropies: Vec<f64> = states.iter().map(gas_entropy).collect();
    let n_ref = spectrum.particle_target().unwrap_or_else(|| states.last().map(|s| s.n_actual).unwrap_or(0.0));
    fit_power_law(&ts, &entropies, n_ref)
}

/// Temperature below which `S < E` with `E = N`: `T* = ω̃`.
pub fn critical_temperature_estimate(fit: &ScalingFit) -> f64 {
    fit.omega_tilde
}

/// As [`critical_temperature_estimate`] for `E = κN`: `T* = ω̃ κ^{1/p}`.
pub fn critical_temperature_estimate_scaled(fit: &ScalingFit, kappa: f64) -> f64 {
    fit.omega_tilde * kappa.powf(1.0 / fit.exponent)
}

/// Classical-regime witness evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MbCheck {
    pub s_mb: f64,
    pub e_assumed: f64,
    pub fires: bool,
    pub omega_tilde_g: f64,
}

/// `exp(Σᵢ ln ωᵢ / N)`; the geometric mean of the spectrum when `N = M`.
pub fn omega_tilde_g(spectrum: &ModeSpectrum, n: f64) -> f64 {
    (spectrum.frequencies().iter().map(|w| w.ln()).sum::<f64>() / n).exp()
}

pub fn mb_witness_check(spectrum: &ModeSpectrum, n: f64, t: f64) -> Result<MbCheck> {
    mb_witness_check_scaled(spectrum, n, t, 1.0)
}

/// `S_MB = N ln T + N(1 − ln ω̃_g)` compared against `E = κN`. Only defined
/// in the classical regime `T ≥ ω̃_g`.
pub fn mb_witness_check_scaled(spectrum: &ModeSpectrum, n: f64, t: f64, kappa: f64) -> Result<MbCheck> {
    check_temperature(t)?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("particle number {n} must be positive")));
    }
    let w_g = omega_tilde_g(spectrum, n);
    if t < w_g {
        return Err(Error::Domain(format!(
            "T = {t} is below the classical regime T >= {w_g}; use the quantum-statistics entropy instead"
        )));
    }
    let s_mb = n * (1.0 + (t / w_g).ln());
    let e_assumed = kappa * n;
    Ok(MbCheck { s_mb, e_assumed, fires: s_mb < e_assumed, omega_tilde_g: w_g })
}

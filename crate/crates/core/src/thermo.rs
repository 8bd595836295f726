//! Canonical-ensemble quantities of an exactly diagonalized Hamiltonian.
//!
//! Temperatures are in energy units (`k_B = 1`), entropies in nats. Every
//! Boltzmann factor is shifted by the ground energy `E₀` so that `β` up to
//! `10⁶` (and beyond) cannot overflow.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::models::DEFAULT_DEGENERACY_TOL;
use crate::qops::{eig_hermitian, DensityOperator, HermitianOperator, PureState, SiteDims, SpectralDecomposition, C64};

/// Scalar thermodynamics of a spectrum at one temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalScalars {
    pub temperature: f64,
    pub beta: f64,
    pub ground_energy: f64,
    /// `ln Σ exp(−β(Eᵢ − E₀))`.
    pub ln_z_shifted: f64,
    pub ln_z: f64,
    pub free_energy: f64,
    pub internal_energy: f64,
    /// `−Σ wᵢ ln wᵢ` over the Boltzmann weights.
    pub entropy: f64,
    /// Weight of a single ground state.
    pub ground_weight: f64,
    /// `β(U − E₀)`, always ≥ 0.
    pub gap_slack: f64,
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTemperature(t))
    }
}

/// Normalized Boltzmann weights of an ascending spectrum, plus `ln Z'`.
pub(crate) fn boltzmann_weights(eigenvalues: &[f64], beta: f64) -> (Vec<f64>, f64) {
    let e0 = eigenvalues[0];
    let raw: Vec<f64> = eigenvalues.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = raw.iter().sum();
    (raw.iter().map(|w| w / z).collect(), z.ln())
}

impl CanonicalScalars {
    /// `eigenvalues` must be sorted ascending.
    pub fn new(eigenvalues: &[f64], temperature: f64) -> Result<Self> {
        check_temperature(temperature)?;
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter("empty spectrum".into()));
        }
        if eigenvalues.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidParameter("spectrum must be sorted ascending".into()));
        }
        let beta = 1.0 / temperature;
        let e0 = eigenvalues[0];
        let (weights, ln_z_shifted) = boltzmann_weights(eigenvalues, beta);
        let excess: f64 = eigenvalues.iter().zip(&weights).map(|(e, w)| (e - e0) * w).sum();
        let entropy = weights.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.ln()).sum::<f64>().max(0.0);
        Ok(CanonicalScalars {
            temperature,
            beta,
            ground_energy: e0,
            ln_z_shifted,
            ln_z: ln_z_shifted - beta * e0,
            free_energy: e0 - temperature * ln_z_shifted,
            internal_energy: e0 + excess,
            entropy,
            ground_weight: weights[0],
            gap_slack: beta * excess,
        })
    }

    /// `−ln p`, evaluated as `ln Z'` to keep precision when `p → 1`.
    pub fn neg_ln_ground_weight(&self) -> f64 {
        self.ln_z_shifted
    }

    pub fn partition_function(&self) -> f64 {
        self.ln_z.exp()
    }
}

/// Thermal state `ρ_T = e^{−H/T}/Z` and its thermodynamics.
#[derive(Clone, Debug)]
pub struct ThermalEnsemble {
    spectral: Arc<SpectralDecomposition>,
    scalars: CanonicalScalars,
    degeneracy: usize,
    rho: DensityOperator,
}

impl ThermalEnsemble {
    /// Builds the ensemble from an existing decomposition; lets temperature
    /// sweeps share a single diagonalization.
    pub fn from_spectrum(spectral: Arc<SpectralDecomposition>, dims: &SiteDims, temperature: f64) -> Result<Self> {
        if spectral.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), actual: spectral.len() });
        }
        let scalars = CanonicalScalars::new(&spectral.eigenvalues, temperature)?;
        let (weights, _) = boltzmann_weights(&spectral.eigenvalues, scalars.beta);
        let n = spectral.len();
        let mut scaled: DMatrix<C64> = spectral.eigenvectors.clone();
        for (k, w) in weights.iter().enumerate() {
            for i in 0..n {
                scaled[(i, k)] *= *w;
            }
        }
        let rho = DensityOperator::from_parts_unchecked(&scaled * spectral.eigenvectors.adjoint(), dims.clone());
        let e0 = scalars.ground_energy;
        let degeneracy = spectral.eigenvalues.iter().take_while(|&&e| e - e0 <= DEFAULT_DEGENERACY_TOL).count();
        Ok(ThermalEnsemble { spectral, scalars, degeneracy, rho })
    }

    pub fn temperature(&self) -> f64 {
        self.scalars.temperature
    }

    pub fn beta(&self) -> f64 {
        self.scalars.beta
    }

    /// `Z`; may overflow to infinity for large `−βE₀`, see [`Self::ln_z`].
    pub fn z(&self) -> f64 {
        self.scalars.partition_function()
    }

    pub fn ln_z(&self) -> f64 {
        self.scalars.ln_z
    }

    pub fn free_energy(&self) -> f64 {
        self.scalars.free_energy
    }

    pub fn internal_energy(&self) -> f64 {
        self.scalars.internal_energy
    }

    pub fn entropy(&self) -> f64 {
        self.scalars.entropy
    }

    pub fn ground_energy(&self) -> f64 {
        self.scalars.ground_energy
    }

    pub fn ground_degeneracy(&self) -> usize {
        self.degeneracy
    }

    pub fn scalars(&self) -> &CanonicalScalars {
        &self.scalars
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }
}

pub fn thermal_ensemble(h: &HermitianOperator, temperature: f64) -> Result<ThermalEnsemble> {
    check_temperature(temperature)?;
    let spectral = Arc::new(eig_hermitian(h)?);
    ThermalEnsemble::from_spectrum(spectral, h.dims(), temperature)
}

/// Population of one ground state, `e^{−βE₀}/Z`. A `g`-fold degenerate ground
/// level has total weight `g·p`.
pub fn ground_weight(ens: &ThermalEnsemble) -> f64 {
    ens.scalars.ground_weight
}

/// `S(|ψ⟩⟨ψ| ‖ ρ_T) = β⟨ψ|H|ψ⟩ + ln Z`.
pub fn rel_entropy_pure_to_thermal(psi: &PureState, ens: &ThermalEnsemble) -> Result<f64> {
    let sp = &ens.spectral;
    if psi.dim() != sp.len() {
        return Err(Error::DimensionMismatch { expected: sp.len(), actual: psi.dim() });
    }
    let e0 = ens.scalars.ground_energy;
    let amps = psi.amplitudes();
    let excess: f64 = sp
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &e)| (e - e0) * sp.eigenvectors.column(k).dotc(amps).norm_sqr())
        .sum();
    Ok(ens.scalars.beta * excess + ens.scalars.ln_z_shifted)
}

/// Outcome of `p ≥ e^{−S}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eq3Check {
    pub p: f64,
    pub exp_neg_s: f64,
    pub holds: bool,
    /// `ln p + S = β(U − E₀)`.
    pub slack: f64,
}

pub fn check_eq3(ens: &ThermalEnsemble) -> Eq3Check {
    check_eq3_scalars(&ens.scalars)
}

pub fn check_eq3_scalars(s: &CanonicalScalars) -> Eq3Check {
    let exp_neg_s = (-s.entropy).exp();
    Eq3Check { p: s.ground_weight, exp_neg_s, holds: s.ground_weight >= exp_neg_s - 1e-10, slack: s.gap_slack }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_spin_hamiltonian, ground_state, Boundary, SpinModelKind, SpinModelSpec};
    use crate::qops::{quantum_relative_entropy, von_neumann_entropy};

    fn diag(levels: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(levels, SiteDims::new(vec![levels.len()]).unwrap()).unwrap()
    }

    fn heisenberg2() -> HermitianOperator {
        build_spin_hamiltonian(&SpinModelSpec::new(SpinModelKind::Heisenberg, 2, 1.0, 0.0, Boundary::Open)).unwrap()
    }

    #[test]
    fn infinite_temperature_limit() {
        let ens = thermal_ensemble(&diag(&[0.0, 1.0]), 1e6).unwrap();
        assert!((ens.entropy() - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn heisenberg_four_level_closed_form() {
        let ens = thermal_ensemble(&heisenberg2(), 1.0).unwrap();
        let z = 3f64.exp() + 3.0 * (-1f64).exp();
        assert!((ens.z() - z).abs() < 1e-10);
        assert!((ens.z() - 21.189).abs() < 1e-3);
        let p = 3f64.exp() / z;
        assert!((ground_weight(&ens) - p).abs() < 1e-12);
        assert!((p - 0.9479).abs() < 1e-4);
        // S = ln Z + βU with U = (−3e³ + 3e⁻¹)/Z
        let u = (-3.0 * 3f64.exp() + 3.0 * (-1f64).exp()) / z;
        let s = z.ln() + u;
        assert!((ens.entropy() - s).abs() < 1e-12);
        assert!((s - 0.262).abs() < 1e-3);
        assert!((ens.rho().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn third_law_limit() {
        let ens = thermal_ensemble(&heisenberg2(), 1e-6).unwrap();
        assert!(ens.entropy() <= 1e-6);
        assert!(ground_weight(&ens) >= 1.0 - 1e-6);
    }

    #[test]
    fn ground_weight_examples() {
        let hot = thermal_ensemble(&diag(&[0.0, 1.0]), 1e12).unwrap();
        assert!((ground_weight(&hot) - 0.5).abs() < 1e-11);
        let t_half = 4.0 / 3f64.ln();
        let ens = thermal_ensemble(&heisenberg2(), t_half).unwrap();
        assert!((ground_weight(&ens) - 0.5).abs() < 1e-12);
        for t in [1e-3, 1.0, 1e3] {
            let ens = thermal_ensemble(&diag(&[0.0, 0.0]), t).unwrap();
            assert!((ground_weight(&ens) - 0.5).abs() < 1e-15);
            assert_eq!(ens.ground_degeneracy(), 2);
        }
    }

    #[test]
    fn rel_entropy_pure_examples() {
        let h = heisenberg2();
        let gs = ground_state(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let ens = thermal_ensemble(&h, t).unwrap();
            let r = rel_entropy_pure_to_thermal(&gs.state, &ens).unwrap();
            assert!((r + ground_weight(&ens).ln()).abs() < 1e-9);
            let oracle = quantum_relative_entropy(&gs.state.projector(), ens.rho()).unwrap();
            assert!((r - oracle).abs() < 1e-7);
        }

        let two = diag(&[0.0, 1.0]);
        let ens = thermal_ensemble(&two, 1.0).unwrap();
        let excited = PureState::basis(1, two.dims().clone()).unwrap();
        let r = rel_entropy_pure_to_thermal(&excited, &ens).unwrap();
        let want = 1.0 + (1.0 + (-1f64).exp()).ln();
        assert!((r - want).abs() < 1e-12);
        assert!((want - 1.3133).abs() < 1e-4);
        let oracle = quantum_relative_entropy(&excited.projector(), ens.rho()).unwrap();
        assert!((r - oracle).abs() < 1e-7);

        let wrong = PureState::basis(0, SiteDims::qubits(2).unwrap()).unwrap();
        assert!(rel_entropy_pure_to_thermal(&wrong, &ens).is_err());
    }

    #[test]
    fn eq3_equality_cases() {
        let hot = check_eq3(&thermal_ensemble(&diag(&[0.0, 1.0]), 1e12).unwrap());
        assert!(hot.holds);
        assert!((hot.p - 0.5).abs() < 1e-10 && (hot.exp_neg_s - 0.5).abs() < 1e-10);
        let cold = check_eq3(&thermal_ensemble(&diag(&[0.0, 1.0]), 1e-3).unwrap());
        assert!(cold.holds && (cold.p - 1.0).abs() < 1e-12 && cold.slack < 1e-9);
    }

    #[test]
    fn eq3_six_level_slack() {
        let levels = [-1.3, -0.2, 0.4, 0.45, 1.7, 2.9];
        let ens = thermal_ensemble(&diag(&levels), 1.0).unwrap();
        let chk = check_eq3(&ens);
        assert!(chk.holds);
        let direct = ens.beta() * (ens.internal_energy() - ens.ground_energy());
        assert!((chk.slack - direct).abs() < 1e-12 && chk.slack > 0.0);
        assert!((chk.p.ln() + ens.entropy() - chk.slack).abs() < 1e-12);
    }

    #[test]
    fn entropy_matches_state_and_identity() {
        let h = heisenberg2();
        for t in [0.2, 1.0, 3.0] {
            let ens = thermal_ensemble(&h, t).unwrap();
            assert!((von_neumann_entropy(ens.rho()) - ens.entropy()).abs() < 1e-10);
            let identity = (ens.internal_energy() - ens.free_energy()) / t;
            assert!((ens.entropy() - identity).abs() <= 1e-8 * ens.entropy().max(1.0));
            let comm = ens.rho().matrix() * h.matrix() - h.matrix() * ens.rho().matrix();
            assert!(comm.iter().all(|z| z.norm() < 1e-9));
        }
    }

    #[test]
    fn nonpositive_temperature_rejected() {
        assert!(matches!(thermal_ensemble(&diag(&[0.0, 1.0]), 0.0), Err(Error::InvalidTemperature(_))));
        assert!(thermal_ensemble(&diag(&[0.0, 1.0]), -1.0).is_err());
        assert!(thermal_ensemble(&diag(&[0.0, 1.0]), f64::NAN).is_err());
    }

    #[test]
    fn extreme_beta_does_not_overflow() {
        let ens = thermal_ensemble(&diag(&[-5.0, 1.0, 2.0]), 1e-9).unwrap();
        assert!(ens.ln_z().is_finite() && ens.free_energy().is_finite());
        assert!((ens.free_energy() + 5.0).abs() < 1e-9);
    }
}

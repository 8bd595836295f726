//! Spin-chain Hamiltonians and free-mode spectra.
//!
//! Pauli operators carry eigenvalues ±1 (no spin-1/2 factors). Sign conventions:
//!
//! * `heisenberg`: `H = J Σ_bonds (XX + YY + ZZ) − h Σ_i Z_i`
//! * `xy`: `H = J Σ_bonds (XX + YY) − h Σ_i Z_i`
//! * `transverse_ising`: `H = −J Σ_bonds ZZ − h Σ_i X_i`
//! * `custom_terms`: only the user-supplied Pauli strings.
//!
//! Custom terms are appended to the terms of every model kind. A periodic
//! chain adds the bond `(n−1, 0)`; for two sites that bond already exists and
//! is not doubled.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qops::{eig_hermitian, HermitianOperator, PureState, SiteDims, SpectralDecomposition, C64};

/// Largest qubit chain accepted by [`build_spin_hamiltonian`].
pub const MAX_QUBIT_SITES: usize = 12;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinModelKind {
    Heisenberg,
    Xy,
    TransverseIsing,
    CustomTerms,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// `coefficient · P_{sites[0]} P_{sites[1]} ...` with `P` drawn from `I`, `X`, `Y`, `Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub sites: Vec<usize>,
    pub paulis: String,
    pub coefficient: f64,
}

impl PauliTerm {
    pub fn new(sites: Vec<usize>, paulis: &str, coefficient: f64) -> Self {
        PauliTerm { sites, paulis: paulis.to_string(), coefficient }
    }

    fn validate(&self, n_sites: usize) -> Result<()> {
        let labels: Vec<char> = self.paulis.chars().collect();
        if labels.len() != self.sites.len() {
            return Err(Error::InvalidParameter(format!(
                "term {:?}: {} Pauli labels for {} sites",
                self.paulis,
                labels.len(),
                self.sites.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|c| !matches!(c, 'I' | 'X' | 'Y' | 'Z')) {
            return Err(Error::InvalidParameter(format!("unknown Pauli label {bad:?}")));
        }
        if let Some(&s) = self.sites.iter().find(|&&s| s >= n_sites) {
            return Err(Error::SiteOutOfRange { index: s, n_sites });
        }
        let mut sorted = self.sites.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.sites.len() {
            return Err(Error::InvalidParameter(format!("term {:?} repeats a site", self.paulis)));
        }
        if !self.coefficient.is_finite() {
            return Err(Error::InvalidParameter("non-finite term coefficient".into()));
        }
        Ok(())
    }
}

fn default_coupling() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinModelSpec {
    pub kind: SpinModelKind,
    pub n_sites: usize,
    #[serde(default = "default_coupling", alias = "J")]
    pub coupling: f64,
    #[serde(default, alias = "h")]
    pub field: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub custom_terms: Vec<PauliTerm>,
}

impl SpinModelSpec {
    pub fn new(kind: SpinModelKind, n_sites: usize, coupling: f64, field: f64, boundary: Boundary) -> Self {
        SpinModelSpec { kind, n_sites, coupling, field, boundary, custom_terms: Vec::new() }
    }

    pub fn with_terms(mut self, terms: Vec<PauliTerm>) -> Self {
        self.custom_terms = terms;
        self
    }
}

fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        out.push((n - 1, 0));
    }
    out
}

/// Expands a model spec into its Pauli-string terms.
pub fn spin_terms(spec: &SpinModelSpec) -> Result<Vec<PauliTerm>> {
    let n = spec.n_sites;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n_sites = {n}, need at least 2")));
    }
    if n > MAX_QUBIT_SITES {
        return Err(Error::DimensionCap { dim: 1usize << n.min(63), cap: 1 << MAX_QUBIT_SITES });
    }
    if !spec.coupling.is_finite() || !spec.field.is_finite() {
        return Err(Error::InvalidParameter("coupling and field must be finite".into()));
    }
    let (j, h) = (spec.coupling, spec.field);
    let mut terms = Vec::new();
    let mut bond_terms = |labels: &[&str], coef: f64| {
        for (a, b) in bonds(n, spec.boundary) {
            for l in labels {
                terms.push(PauliTerm::new(vec![a, b], l, coef));
            }
        }
    };
    match spec.kind {
        SpinModelKind::Heisenberg => bond_terms(&["XX", "YY", "ZZ"], j),
        SpinModelKind::Xy => bond_terms(&["XX", "YY"], j),
        SpinModelKind::TransverseIsing => bond_terms(&["ZZ"], -j),
        SpinModelKind::CustomTerms => {}
    }
    match spec.kind {
        SpinModelKind::Heisenberg | SpinModelKind::Xy if h != 0.0 => {
            terms.extend((0..n).map(|i| PauliTerm::new(vec![i], "Z", -h)));
        }
        SpinModelKind::TransverseIsing => {
            terms.extend((0..n).map(|i| PauliTerm::new(vec![i], "X", -h)));
        }
        _ => {}
    }
    for t in &spec.custom_terms {
        t.validate(n)?;
        terms.push(t.clone());
    }
    Ok(terms)
}

/// Dense Hamiltonian on `n_sites` qubits. Pauli strings act as signed
/// permutations of the computational basis, so each term costs `O(2^n)`.
pub fn build_spin_hamiltonian(spec: &SpinModelSpec) -> Result<HermitianOperator> {
    let terms = spin_terms(spec)?;
    let n = spec.n_sites;
    let dims = SiteDims::qubits(n)?;
    let d = dims.total();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for t in &terms {
        let mut flip = 0usize;
        let mut y_mask = 0usize;
        let mut phase_mask = 0usize; // bits whose value 1 contributes a −1 (Z) or −i vs i (Y)
        for (&site, label) in t.sites.iter().zip(t.paulis.chars()) {
            let bit = 1usize << (n - 1 - site);
            match label {
                'X' => flip |= bit,
                'Y' => {
                    flip |= bit;
                    y_mask |= bit;
                }
                'Z' => phase_mask |= bit,
                _ => {}
            }
        }
        let n_y = y_mask.count_ones();
        // Y|0> = i|1>, Y|1> = -i|0>: each Y contributes i·(−1)^bit.
        let base = match n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        for b in 0..d {
            let sign_bits = ((b & phase_mask).count_ones() + (b & y_mask).count_ones()) % 2;
            let phase = if sign_bits == 1 { -base } else { base };
            m[(b ^ flip, b)] += phase * t.coefficient;
        }
    }
    HermitianOperator::new(m, dims)
}

/// Ground state together with the number of eigenvalues within the
/// degeneracy tolerance of the lowest.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateResult {
    pub state: PureState,
    pub energy: f64,
    pub degeneracy: usize,
}

impl GroundStateResult {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy > 1
    }
}

pub fn ground_state(h: &HermitianOperator, degeneracy_tol: f64) -> Result<GroundStateResult> {
    let spectral = eig_hermitian(h)?;
    ground_state_from_spectrum(&spectral, h.dims(), degeneracy_tol)
}

/// Ground state read off an existing decomposition (eigenvector of lowest index).
pub fn ground_state_from_spectrum(
    spectral: &SpectralDecomposition,
    dims: &SiteDims,
    degeneracy_tol: f64,
) -> Result<GroundStateResult> {
    let energy = *spectral.eigenvalues.first().ok_or_else(|| Error::InvalidParameter("empty spectrum".into()))?;
    let degeneracy = spectral.eigenvalues.iter().take_while(|&&e| e - energy <= degeneracy_tol).count();
    let state = PureState::normalized(spectral.eigenvector(0), dims.clone())?;
    Ok(GroundStateResult { state, energy, degeneracy })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Bose,
    Fermi,
    Boltzmann,
}

/// Either a target mean particle number or a fixed chemical potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParticleConstraint {
    Number(f64),
    ChemicalPotential(f64),
}

/// Single-particle mode frequencies, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpectrum {
    frequencies: Vec<f64>,
    statistics: Statistics,
    constraint: ParticleConstraint,
}

impl ModeSpectrum {
    pub fn new(mut frequencies: Vec<f64>, statistics: Statistics, constraint: ParticleConstraint) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::InvalidParameter("spectrum has no modes".into()));
        }
        if let Some(&w) = frequencies.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("nonpositive frequency {w}")));
        }
        frequencies.sort_by(f64::total_cmp);
        match constraint {
            ParticleConstraint::Number(n) if !(n > 0.0) || !n.is_finite() => {
                return Err(Error::InvalidParameter(format!("particle target {n} must be positive")));
            }
            ParticleConstraint::ChemicalPotential(mu) if !mu.is_finite() => {
                return Err(Error::InvalidParameter("chemical potential must be finite".into()));
            }
            ParticleConstraint::ChemicalPotential(mu) if statistics == Statistics::Bose && mu >= frequencies[0] => {
                return Err(Error::Domain(format!(
                    "bose chemical potential {mu} must lie below the lowest mode {}",
                    frequencies[0]
                )));
            }
            _ => {}
        }
        Ok(ModeSpectrum { frequencies, statistics, constraint })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn constraint(&self) -> ParticleConstraint {
        self.constraint
    }

    pub fn particle_target(&self) -> Option<f64> {
        match self.constraint {
            ParticleConstraint::Number(n) => Some(n),
            ParticleConstraint::ChemicalPotential(_) => None,
        }
    }

    pub fn chemical_potential(&self) -> Option<f64> {
        match self.constraint {
            ParticleConstraint::ChemicalPotential(mu) => Some(mu),
            ParticleConstraint::Number(_) => None,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    pub fn min_frequency(&self) -> f64 {
        self.frequencies[0]
    }

    pub fn max_frequency(&self) -> f64 {
        *self.frequencies.last().unwrap()
    }

    pub fn with_constraint(&self, constraint: ParticleConstraint) -> Result<Self> {
        ModeSpectrum::new(self.frequencies.clone(), self.statistics, constraint)
    }
}

/// Frequency generators for [`make_spectrum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumKind {
    /// `modes` copies of `omega`.
    Uniform {
        modes: usize,
        omega: f64,
    },
    /// `ω_k = c·k` for `k = 1..=modes`.
    LinearDispersion {
        modes: usize,
        c: f64,
    },
    Custom {
        frequencies: Vec<f64>,
    },
}

pub fn make_spectrum(
    kind: &SpectrumKind,
    statistics: Statistics,
    constraint: ParticleConstraint,
) -> Result<ModeSpectrum> {
    let freqs = match kind {
        SpectrumKind::Uniform { modes, omega } => vec![*omega; *modes],
        SpectrumKind::LinearDispersion { modes, c } => (1..=*modes).map(|k| c * k as f64).collect(),
        SpectrumKind::Custom { frequencies } => frequencies.clone(),
    };
    ModeSpectrum::new(freqs, statistics, constraint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::pauli;

    fn spectrum_of(spec: &SpinModelSpec) -> Vec<f64> {
        eig_hermitian(&build_spin_hamiltonian(spec).unwrap()).unwrap().eigenvalues
    }

    fn assert_spectrum(got: &[f64], want: &[f64]) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn two_site_spectra() {
        let heis = SpinModelSpec::new(SpinModelKind::Heisenberg, 2, 1.0, 0.0, Boundary::Open);
        assert_spectrum(&spectrum_of(&heis), &[-3.0, 1.0, 1.0, 1.0]);
        let xy = SpinModelSpec::new(SpinModelKind::Xy, 2, 1.0, 0.0, Boundary::Open);
        assert_spectrum(&spectrum_of(&xy), &[-2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn heisenberg_matches_kronecker_construction() {
        let spec = SpinModelSpec::new(SpinModelKind::Heisenberg, 2, 0.7, 0.0, Boundary::Open);
        let h = build_spin_hamiltonian(&spec).unwrap();
        let oracle =
            (pauli::x().kronecker(&pauli::x()) + pauli::y().kronecker(&pauli::y()) + pauli::z().kronecker(&pauli::z()))
                * C64::new(0.7, 0.0);
        assert!((h.matrix() - oracle).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn transverse_ising_free_limit() {
        let spec = SpinModelSpec::new(SpinModelKind::TransverseIsing, 2, 0.0, 1.0, Boundary::Open);
        let h = build_spin_hamiltonian(&spec).unwrap();
        let oracle = -(pauli::x().kronecker(&pauli::i2()) + pauli::i2().kronecker(&pauli::x()));
        assert!((h.matrix() - oracle).iter().all(|z| z.norm() < 1e-15));
        let gs = ground_state(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!((gs.energy + 2.0).abs() < 1e-12);
        assert_eq!(gs.degeneracy, 1);
        for a in gs.state.amplitudes().iter() {
            assert!((a - C64::new(0.5, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn heisenberg_singlet_ground_state() {
        let spec = SpinModelSpec::new(SpinModelKind::Heisenberg, 2, 1.0, 0.0, Boundary::Open);
        let gs = ground_state(&build_spin_hamiltonian(&spec).unwrap(), DEFAULT_DEGENERACY_TOL).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = [0.0, s, -s, 0.0];
        for (a, w) in gs.state.amplitudes().iter().zip(want) {
            assert!((a - C64::new(w, 0.0)).norm() < 1e-10);
        }
        assert!((gs.energy + 3.0).abs() < 1e-12);
        assert_eq!(gs.degeneracy, 1);
    }

    #[test]
    fn manifest_degeneracy_is_flagged() {
        let spec = SpinModelSpec::new(SpinModelKind::CustomTerms, 2, 0.0, 0.0, Boundary::Open)
            .with_terms(vec![PauliTerm::new(vec![0], "Z", 1.0)]);
        let gs = ground_state(&build_spin_hamiltonian(&spec).unwrap(), DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(gs.degeneracy, 2);
        assert!(gs.is_degenerate());
        assert!((gs.energy + 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_adds_only_wrap_bonds() {
        for kind in [SpinModelKind::Heisenberg, SpinModelKind::Xy, SpinModelKind::TransverseIsing] {
            for n in 3..=6 {
                let open = spin_terms(&SpinModelSpec::new(kind, n, 1.0, 0.5, Boundary::Open)).unwrap();
                let ring = spin_terms(&SpinModelSpec::new(kind, n, 1.0, 0.5, Boundary::Periodic)).unwrap();
                let per_bond = match kind {
                    SpinModelKind::Heisenberg => 3,
                    SpinModelKind::Xy => 2,
                    _ => 1,
                };
                assert_eq!(ring.len() - open.len(), per_bond);
                assert!(ring.iter().filter(|t| t.sites == vec![n - 1, 0]).count() == per_bond);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let too_big = SpinModelSpec::new(SpinModelKind::Heisenberg, 13, 1.0, 0.0, Boundary::Open);
        assert!(matches!(build_spin_hamiltonian(&too_big), Err(Error::DimensionCap { .. })));
        let one = SpinModelSpec::new(SpinModelKind::Heisenberg, 1, 1.0, 0.0, Boundary::Open);
        assert!(build_spin_hamiltonian(&one).is_err());
        let bad_site = SpinModelSpec::new(SpinModelKind::CustomTerms, 2, 1.0, 0.0, Boundary::Open)
            .with_terms(vec![PauliTerm::new(vec![0, 2], "XX", 1.0)]);
        assert!(matches!(build_spin_hamiltonian(&bad_site), Err(Error::SiteOutOfRange { .. })));
        let bad_label = SpinModelSpec::new(SpinModelKind::CustomTerms, 2, 1.0, 0.0, Boundary::Open)
            .with_terms(vec![PauliTerm::new(vec![0, 1], "XQ", 1.0)]);
        assert!(build_spin_hamiltonian(&bad_label).is_err());
        let repeated = SpinModelSpec::new(SpinModelKind::CustomTerms, 2, 1.0, 0.0, Boundary::Open)
            .with_terms(vec![PauliTerm::new(vec![1, 1], "XZ", 1.0)]);
        assert!(build_spin_hamiltonian(&repeated).is_err());
    }

    #[test]
    fn y_terms_are_hermitian_and_match_kronecker() {
        let spec = SpinModelSpec::new(SpinModelKind::CustomTerms, 3, 0.0, 0.0, Boundary::Open)
            .with_terms(vec![PauliTerm::new(vec![2, 0], "YX", 0.3), PauliTerm::new(vec![1], "Y", -1.1)]);
        let h = build_spin_hamiltonian(&spec).unwrap();
        let oracle = pauli::x().kronecker(&pauli::i2()).kronecker(&pauli::y()) * C64::new(0.3, 0.0)
            + pauli::i2().kronecker(&pauli::y()).kronecker(&pauli::i2()) * C64::new(-1.1, 0.0);
        assert!((h.matrix() - oracle).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn spectrum_generators() {
        let u = make_spectrum(
            &SpectrumKind::Uniform { modes: 4, omega: 1.0 },
            Statistics::Bose,
            ParticleConstraint::Number(1.0),
        )
        .unwrap();
        assert_eq!(u.frequencies(), &[1.0; 4]);
        let l = make_spectrum(
            &SpectrumKind::LinearDispersion { modes: 3, c: 0.5 },
            Statistics::Fermi,
            ParticleConstraint::ChemicalPotential(0.0),
        )
        .unwrap();
        assert_eq!(l.frequencies(), &[0.5, 1.0, 1.5]);
        let c = make_spectrum(
            &SpectrumKind::Custom { frequencies: vec![2.0, 1.0, 3.0] },
            Statistics::Boltzmann,
            ParticleConstraint::Number(2.0),
        )
        .unwrap();
        assert_eq!(c.frequencies(), &[1.0, 2.0, 3.0]);
        assert!(make_spectrum(
            &SpectrumKind::Custom { frequencies: vec![1.0, 0.0] },
            Statistics::Fermi,
            ParticleConstraint::Number(1.0)
        )
        .is_err());
        assert!(matches!(
            ModeSpectrum::new(vec![1.0, 2.0], Statistics::Bose, ParticleConstraint::ChemicalPotential(1.0)),
            Err(Error::Domain(_))
        ));
    }
}

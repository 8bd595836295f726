//! Entanglement quantifiers: exact bipartite pure-state entropy, bounds on the
//! relative entropy of entanglement with respect to fully separable states,
//! the separable-energy witness and the PPT test.

mod frank_wolfe;
mod product;

use rayon::prelude::*;

pub use frank_wolfe::{frank_wolfe_ree, ree_upper_bound, FrankWolfeConfig, FrankWolfeRun, DIVIDED_DIFFERENCE_TOL};
pub use product::{closest_product_state, Extremum, ProductSearch, ProductStateAnsatz};

use crate::error::{Error, Result};
use crate::qops::{
    eigh, entropy_of_spectrum, hermitian_eigenvalues, partial_transpose, DensityOperator, HermitianOperator, PureState,
};

/// Chains longer than this only enumerate contiguous cuts.
pub const MAX_EXHAUSTIVE_CUT_SITES: usize = 12;

/// Bipartition `A | B` of the sites, `A` nonempty and proper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCut {
    side_a: Vec<usize>,
    n_sites: usize,
}

impl PartitionCut {
    pub fn new(side_a: &[usize], n_sites: usize) -> Result<Self> {
        let mut a = side_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.is_empty() || a.len() >= n_sites {
            return Err(Error::InvalidPartition(format!(
                "side A {side_a:?} must be a nonempty proper subset of {n_sites} sites"
            )));
        }
        if let Some(&s) = a.iter().find(|&&s| s >= n_sites) {
            return Err(Error::SiteOutOfRange { index: s, n_sites });
        }
        Ok(PartitionCut { side_a: a, n_sites })
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> Vec<usize> {
        (0..self.n_sites).filter(|s| self.side_a.binary_search(s).is_err()).collect()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    PureBipartiteExact,
    MaxCutLower,
    FrankWolfeUpper,
}

/// Bracket on a relative entropy of entanglement, in nats.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementEstimate {
    pub lower: f64,
    pub upper: Option<f64>,
    pub method: EstimateMethod,
    pub iterations: usize,
    pub converged: bool,
    /// Cut attaining `lower`, for cut-based estimates.
    pub cut: Option<PartitionCut>,
}

impl EntanglementEstimate {
    /// An estimate with a known lower bound and nothing else, for callers
    /// that computed `E` by other means.
    pub fn from_lower(lower: f64) -> Self {
        EntanglementEstimate {
            lower,
            upper: None,
            method: EstimateMethod::PureBipartiteExact,
            iterations: 0,
            converged: true,
            cut: None,
        }
    }
}

fn check_cut(psi: &PureState, cut: &PartitionCut) -> Result<()> {
    if cut.n_sites != psi.dims().n_sites() {
        return Err(Error::InvalidPartition(format!(
            "cut over {} sites applied to a {}-site state",
            cut.n_sites,
            psi.dims().n_sites()
        )));
    }
    Ok(())
}

/// Entropy of the reduced state on one side of `cut`. Uses whichever side
/// has the smaller dimension; both give the same value for a pure state.
pub fn entanglement_entropy_pure(psi: &PureState, cut: &PartitionCut) -> Result<f64> {
    check_cut(psi, cut)?;
    let dims = psi.dims().as_slice();
    let dim_of = |sites: &[usize]| sites.iter().map(|&s| dims[s]).product::<usize>();
    let b = cut.side_b();
    let side: &[usize] = if dim_of(cut.side_a()) <= dim_of(&b) { cut.side_a() } else { &b };
    let reduced = psi.reduced_state(side)?;
    Ok(entropy_of_spectrum(&hermitian_eigenvalues(reduced.matrix())))
}

fn candidate_cuts(n: usize) -> Vec<Vec<usize>> {
    if n <= MAX_EXHAUSTIVE_CUT_SITES {
        // every subset containing site 0, except the full set: 2^(n-1) - 1 cuts
        let full = (1usize << n) - 1;
        (1..full).filter(|m| m & 1 == 1).map(|m| (0..n).filter(|s| m >> s & 1 == 1).collect()).collect()
    } else {
        let mut cuts = Vec::new();
        for a in 0..n {
            for b in a + 1..=n {
                if (a, b) != (0, n) {
                    cuts.push((a..b).collect());
                }
            }
        }
        cuts
    }
}

/// Largest bipartite entanglement entropy over all cuts.
///
/// Fully separable states are separable across every cut, so each cut entropy
/// lower-bounds the relative entropy of entanglement of a pure state.
pub fn ree_lower_bound(psi: &PureState) -> Result<EntanglementEstimate> {
    let n = psi.dims().n_sites();
    if n < 2 {
        return Ok(EntanglementEstimate {
            lower: 0.0,
            upper: Some(0.0),
            method: EstimateMethod::MaxCutLower,
            iterations: 0,
            converged: true,
            cut: None,
        });
    }
    let cuts = candidate_cuts(n);
    let values: Vec<(PartitionCut, f64)> = cuts
        .par_iter()
        .map(|a| {
            let cut = PartitionCut::new(a, n)?;
            let s = entanglement_entropy_pure(psi, &cut)?;
            Ok((cut, s))
        })
        .collect::<Result<_>>()?;
    let count = values.len();
    let mut best: Option<(PartitionCut, f64)> = None;
    for (cut, s) in values {
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((cut, s));
        }
    }
    let (cut, lower) = best.expect("n >= 2 gives at least one cut");
    Ok(EntanglementEstimate {
        lower,
        upper: None,
        method: EstimateMethod::MaxCutLower,
        iterations: count,
        converged: true,
        cut: Some(cut),
    })
}

/// Separable-energy witness verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyWitness {
    /// Smallest `⟨H⟩` found over product pure states.
    pub sep_min: f64,
    pub entangled: bool,
    pub minimizer: ProductStateAnsatz,
}

/// A state with energy below every product state's energy (hence below every
/// separable state's) is entangled. The comparison is strict with a 1e−9 band.
pub fn energy_witness(h: &HermitianOperator, energy: f64, search: &ProductSearch) -> EnergyWitness {
    let (minimizer, sep_min) = closest_product_state(h, Extremum::Minimize, search);
    EnergyWitness { sep_min, entangled: energy < sep_min - 1e-9, minimizer }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptCheck {
    pub min_eig: f64,
    /// Negative partial transpose: certifies entanglement across the cut.
    pub npt: bool,
}

pub fn ppt_check(rho: &DensityOperator, cut: &PartitionCut) -> Result<PptCheck> {
    if cut.n_sites != rho.dims().n_sites() {
        return Err(Error::InvalidPartition(format!(
            "cut over {} sites applied to a {}-site state",
            cut.n_sites,
            rho.dims().n_sites()
        )));
    }
    let pt = partial_transpose(rho, cut.side_a())?;
    let min_eig = eigh(pt.matrix())?.eigenvalues[0];
    Ok(PptCheck { min_eig, npt: min_eig < -1e-10 })
}

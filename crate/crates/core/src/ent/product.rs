//! Extremal expectation values over fully product pure states.
//!
//! Alternating maximization: with every factor but one frozen, `⟨Φ|A|Φ⟩` is a
//! Hermitian form in the free factor, whose optimum is an extremal
//! eigenvector of the reduced single-site operator.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::qops::{eigh, HermitianOperator, PureState, SiteDims, C64};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Maximize,
    Minimize,
}

impl Extremum {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Extremum::Maximize => a > b,
            Extremum::Minimize => a < b,
        }
    }
}

/// Multistart settings for [`closest_product_state`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSearch {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Stationarity threshold on the change of the objective per sweep.
    pub tol: f64,
}

impl Default for ProductSearch {
    fn default() -> Self {
        ProductSearch { restarts: 32, seed: rng::DEFAULT_SEED, max_sweeps: 1000, tol: 1e-10 }
    }
}

/// A product pure state `⊗ᵢ |φᵢ⟩` carrying a mixing weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductStateAnsatz {
    pub factors: Vec<DVector<C64>>,
    pub weight: f64,
}

impl ProductStateAnsatz {
    pub fn to_state(&self) -> PureState {
        PureState::product(&self.factors).expect("factors are unit vectors with valid dims")
    }

    pub fn amplitudes(&self) -> DVector<C64> {
        self.factors.iter().fold(DVector::from_element(1, C64::new(1.0, 0.0)), |acc, f| acc.kronecker(f))
    }
}

fn site_offsets(dims: &[usize]) -> Vec<Vec<usize>> {
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for s in (0..n.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    (0..n).map(|s| (0..dims[s]).map(|k| k * strides[s]).collect()).collect()
}

/// `M[a,b] = ⟨χ, a| A |χ, b⟩` where `χ` is the product of all factors except `site`.
fn reduced_operator(
    a: &DMatrix<C64>,
    dims: &[usize],
    offsets: &[Vec<usize>],
    factors: &[DVector<C64>],
    site: usize,
) -> DMatrix<C64> {
    let mut env = vec![(0usize, C64::new(1.0, 0.0))];
    for (s, f) in factors.iter().enumerate() {
        if s == site {
            continue;
        }
        let mut next = Vec::with_capacity(env.len() * dims[s]);
        for &(off, amp) in &env {
            for (k, &o) in offsets[s].iter().enumerate() {
                next.push((off + o, amp * f[k]));
            }
        }
        env = next;
    }
    let own = &offsets[site];
    DMatrix::from_fn(own.len(), own.len(), |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for &(r, cr) in &env {
            let row = own[i] + r;
            let mut inner = C64::new(0.0, 0.0);
            for &(c, cc) in &env {
                inner += a[(row, own[j] + c)] * cc;
            }
            acc += cr.conj() * inner;
        }
        acc
    })
}

/// Extremal eigenpair of a Hermitian matrix; closed form for 2×2.
fn extremal_eigenpair(m: &DMatrix<C64>, mode: Extremum) -> Option<(f64, DVector<C64>)> {
    if m.nrows() == 2 {
        let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let lam = match mode {
            Extremum::Maximize => mean + r,
            Extremum::Minimize => mean - r,
        };
        // (A − λ) v = 0: both rows give a candidate, keep the better conditioned one
        let v1 = DVector::from_vec(vec![b, C64::new(lam - a, 0.0)]);
        let v2 = DVector::from_vec(vec![C64::new(lam - d, 0.0), b.conj()]);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        let norm = v.norm();
        let v = if norm > 1e-300 {
            v.unscale(norm)
        } else {
            DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
        };
        return Some((lam, v));
    }
    let eig = eigh(m).ok()?;
    let k = match mode {
        Extremum::Minimize => 0,
        Extremum::Maximize => eig.len() - 1,
    };
    Some((eig.eigenvalues[k], eig.eigenvector(k)))
}

fn optimize(
    a: &DMatrix<C64>,
    dims: &[usize],
    offsets: &[Vec<usize>],
    mut factors: Vec<DVector<C64>>,
    mode: Extremum,
    search: &ProductSearch,
) -> (Vec<DVector<C64>>, f64) {
    let mut prev = f64::NAN;
    let mut value = f64::NAN;
    for _ in 0..search.max_sweeps.max(1) {
        for site in 0..factors.len() {
            let m = reduced_operator(a, dims, offsets, &factors, site);
            let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
            let Some((lam, v)) = extremal_eigenpair(&m, mode) else { continue };
            factors[site] = v;
            value = lam;
        }
        if (value - prev).abs() < search.tol {
            break;
        }
        prev = value;
    }
    (factors, value)
}

/// Best product state found by multistart alternating optimization, with its
/// expectation value.
pub fn closest_product_state(
    target: &HermitianOperator,
    mode: Extremum,
    search: &ProductSearch,
) -> (ProductStateAnsatz, f64) {
    closest_product_state_from(target, mode, search, None)
}

/// As [`closest_product_state`], additionally starting from `warm` when given.
pub(crate) fn closest_product_state_from(
    target: &HermitianOperator,
    mode: Extremum,
    search: &ProductSearch,
    warm: Option<&[DVector<C64>]>,
) -> (ProductStateAnsatz, f64) {
    let dims: &SiteDims = target.dims();
    let d = dims.as_slice();
    let offsets = site_offsets(d);
    let a = target.matrix();

    let random_start = |r: usize| -> Vec<DVector<C64>> {
        let mut g = rng::stream(search.seed, r as u64);
        d.iter().map(|&k| rng::random_unit_vector(&mut g, k)).collect()
    };
    let mut starts: Vec<Vec<DVector<C64>>> = Vec::with_capacity(search.restarts + 1);
    if let Some(w) = warm {
        starts.push(w.to_vec());
    }
    starts.extend((0..search.restarts.max(1)).map(random_start));

    let results: Vec<(Vec<DVector<C64>>, f64)> =
        starts.into_par_iter().map(|s| optimize(a, d, &offsets, s, mode, search)).collect();

    let mut best: Option<(Vec<DVector<C64>>, f64)> = None;
    for (factors, value) in results {
        match &best {
            Some((_, v)) if !mode.better(value, *v) => {}
            _ => best = Some((factors, value)),
        }
    }
    let (factors, value) = best.expect("at least one start");
    (ProductStateAnsatz { factors, weight: 1.0 }, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_spin_hamiltonian, Boundary, SpinModelKind, SpinModelSpec};
    use crate::qops::{pauli, DensityOperator};

    fn q2() -> SiteDims {
        SiteDims::qubits(2).unwrap()
    }

    #[test]
    fn zz_minimum_is_antialigned() {
        let zz = HermitianOperator::new(pauli::z().kronecker(&pauli::z()), q2()).unwrap();
        let (ans, v) = closest_product_state(&zz, Extremum::Minimize, &ProductSearch::default());
        assert!((v + 1.0).abs() < 1e-10);
        let psi = ans.to_state();
        assert!((zz.expectation(&psi).unwrap() - v).abs() < 1e-10);
    }

    #[test]
    fn heisenberg_separable_minimum() {
        let h = build_spin_hamiltonian(&SpinModelSpec::new(SpinModelKind::Heisenberg, 2, 1.0, 0.0, Boundary::Open))
            .unwrap();
        let (_, v) = closest_product_state(&h, Extremum::Minimize, &ProductSearch::default());
        assert!((v + 1.0).abs() < 1e-8);
    }

    #[test]
    fn bell_overlap_maximum() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(
            DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]),
            q2(),
        )
        .unwrap();
        let target = DensityOperator::from_pure(&bell).to_hermitian();
        let (_, v) = closest_product_state(&target, Extremum::Maximize, &ProductSearch::default());
        assert!((v - 0.5).abs() < 1e-8);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let h = build_spin_hamiltonian(&SpinModelSpec::new(
            SpinModelKind::TransverseIsing,
            3,
            1.0,
            0.7,
            Boundary::Periodic,
        ))
        .unwrap();
        let search = ProductSearch { restarts: 8, ..Default::default() };
        let (a1, v1) = closest_product_state(&h, Extremum::Minimize, &search);
        let (a2, v2) = closest_product_state(&h, Extremum::Minimize, &search);
        assert_eq!(v1.to_bits(), v2.to_bits());
        assert_eq!(a1, a2);
    }

    #[test]
    fn closed_form_eigenpair_matches_solver() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.3, 0.0), C64::new(-0.2, 0.7), C64::new(-0.2, -0.7), C64::new(-1.1, 0.0)],
        );
        let eig = eigh(&m).unwrap();
        for (mode, k) in [(Extremum::Minimize, 0), (Extremum::Maximize, 1)] {
            let (lam, v) = extremal_eigenpair(&m, mode).unwrap();
            assert!((lam - eig.eigenvalues[k]).abs() < 1e-12);
            assert!((v.dotc(&eig.eigenvector(k)).norm() - 1.0).abs() < 1e-12);
        }
        let diag = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        );
        let (lam, v) = extremal_eigenpair(&diag, Extremum::Minimize).unwrap();
        assert_eq!(lam, -1.0);
        assert!((v[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qutrit_qubit_product() {
        // diag over a 3x2 space: minimum is the smallest diagonal entry
        let dims = SiteDims::new(vec![3, 2]).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[0.4, 0.1, -0.3, 0.9, 0.2, -0.05], dims).unwrap();
        let (ans, v) = closest_product_state(&h, Extremum::Minimize, &ProductSearch::default());
        assert!((v + 0.3).abs() < 1e-10);
        assert_eq!(ans.factors[0].len(), 3);
    }
}

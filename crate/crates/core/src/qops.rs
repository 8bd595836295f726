//! Dense complex Hermitian linear algebra on multi-site Hilbert spaces.
//!
//! Sites are ordered most-significant first: for `dims = [d0, d1, ...]` the
//! computational basis index is `i0 * (d1 * d2 * ...) + i1 * (d2 * ...) + ...`,
//! which matches the Kronecker-product ordering `A0 ⊗ A1 ⊗ ...`.
//!
//! All entropies are in nats. Units are chosen so that `k_B = ħ = 1`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest Hilbert-space dimension accepted by [`SiteDims::new`].
pub const DEFAULT_DIMENSION_CAP: usize = 16384;
/// Max entry of `A - A†` tolerated for a Hermitian operator.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on trace and negative eigenvalues of a density operator.
pub const DENSITY_TOL: f64 = 1e-10;
/// Tolerance on the norm of a pure state.
pub const NORM_TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as exact zeros inside logarithms.
pub const LOG_CLAMP: f64 = 1e-12;
/// Weight above which an eigenvalue of the first argument counts as support.
pub const SUPPORT_TOL: f64 = 1e-10;

const EIG_MAX_ITER: usize = 10_000;

/// Local dimension of every site.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SiteDims(Vec<usize>);

impl SiteDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one site is required".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= cap)
                .ok_or(Error::DimensionCap { dim: dims.iter().fold(1usize, |a, &b| a.saturating_mul(b)), cap })?;
        }
        Ok(SiteDims(dims))
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn n_sites(&self) -> usize {
        self.0.len()
    }

    /// Product of all local dimensions.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Dimensions of the concatenated system `self ⊗ other`.
    pub fn concat(&self, other: &SiteDims) -> Result<SiteDims> {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        SiteDims::new(dims)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for s in (0..self.0.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * self.0[s + 1];
        }
        strides
    }

    // Sub-dimensions are always valid: entries >= 2 and product <= total.
    fn restrict(&self, sites: &[usize]) -> SiteDims {
        SiteDims(sites.iter().map(|&s| self.0[s]).collect())
    }

    /// Offsets in the full index space of every multi-index over `sites`,
    /// enumerated in the sub-system's own row-major order.
    fn offsets(&self, sites: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &s in sites {
            let d = self.0[s];
            let mut next = Vec::with_capacity(out.len() * d);
            for &base in &out {
                for k in 0..d {
                    next.push(base + k * strides[s]);
                }
            }
            out = next;
        }
        out
    }

    /// Validates a site set; returns it sorted and deduplicated together with
    /// its complement.
    fn split(&self, sites: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
        let n = self.n_sites();
        let mut chosen: Vec<usize> = sites.to_vec();
        chosen.sort_unstable();
        chosen.dedup();
        if let Some(&bad) = chosen.iter().find(|&&s| s >= n) {
            return Err(Error::SiteOutOfRange { index: bad, n_sites: n });
        }
        let rest = (0..n).filter(|s| chosen.binary_search(s).is_err()).collect();
        Ok((chosen, rest))
    }
}

fn max_antihermitian(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_square(m: &DMatrix<C64>, dims: &SiteDims) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidParameter(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if m.nrows() != dims.total() {
        return Err(Error::DimensionMismatch { expected: dims.total(), actual: m.nrows() });
    }
    Ok(())
}

/// Averages `m` with its adjoint.
pub(crate) fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Dense Hermitian operator on a multi-site space.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
    dims: SiteDims,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>, dims: SiteDims) -> Result<Self> {
        check_square(&matrix, &dims)?;
        let deviation = max_antihermitian(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(HermitianOperator { matrix, dims })
    }

    /// Wraps `matrix` after averaging it with its adjoint.
    pub(crate) fn from_hermitized(matrix: &DMatrix<C64>, dims: SiteDims) -> Self {
        HermitianOperator { matrix: hermitize(matrix), dims }
    }

    pub fn from_real_diagonal(diag: &[f64], dims: SiteDims) -> Result<Self> {
        if diag.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), actual: diag.len() });
        }
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Ok(HermitianOperator { matrix: DMatrix::from_diagonal(&v), dims })
    }

    pub fn identity(dims: SiteDims) -> Self {
        let n = dims.total();
        HermitianOperator { matrix: DMatrix::identity(n, n), dims }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: psi.dim() });
        }
        let a = psi.amplitudes();
        Ok(a.dotc(&(&self.matrix * a)).re)
    }

    /// Max-entry norm `max |A_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Unit-trace positive-semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    dims: SiteDims,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<C64>, dims: SiteDims) -> Result<Self> {
        check_square(&matrix, &dims)?;
        let deviation = max_antihermitian(&matrix);
        if deviation > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace = {trace}")));
        }
        let min = hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityOperator { matrix, dims })
    }

    // Callers guarantee the invariants by construction.
    pub(crate) fn from_parts_unchecked(matrix: DMatrix<C64>, dims: SiteDims) -> Self {
        DensityOperator { matrix, dims }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        DensityOperator { matrix: a * a.adjoint(), dims: psi.dims().clone() }
    }

    pub fn maximally_mixed(dims: SiteDims) -> Self {
        let n = dims.total();
        DensityOperator { matrix: DMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0), dims }
    }

    /// Diagonal state in the computational basis.
    pub fn from_probabilities(probs: &[f64], dims: SiteDims) -> Result<Self> {
        if probs.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), actual: probs.len() });
        }
        if probs.iter().any(|&p| p < -DENSITY_TOL || !p.is_finite()) {
            return Err(Error::NotDensity("negative probability".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("probabilities sum to {sum}")));
        }
        let v = DVector::from_iterator(probs.len(), probs.iter().map(|&p| C64::new(p, 0.0)));
        Ok(DensityOperator { matrix: DMatrix::from_diagonal(&v), dims })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn to_hermitian(&self) -> HermitianOperator {
        HermitianOperator { matrix: self.matrix.clone(), dims: self.dims.clone() }
    }

    /// `self ⊗ other` with concatenated site dimensions.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(DensityOperator { matrix: self.matrix.kronecker(&other.matrix), dims })
    }

    /// `(1 - weight) * self + weight * other`, for `weight` in `[0, 1]`.
    pub(crate) fn mix(&self, other: &DMatrix<C64>, weight: f64) -> DensityOperator {
        DensityOperator {
            matrix: &self.matrix * C64::new(1.0 - weight, 0.0) + other * C64::new(weight, 0.0),
            dims: self.dims.clone(),
        }
    }

    /// Same state with every off-diagonal entry removed.
    pub fn dephased(&self) -> DensityOperator {
        DensityOperator { matrix: DMatrix::from_diagonal(&self.matrix.diagonal()), dims: self.dims.clone() }
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
    dims: SiteDims,
}

impl PureState {
    pub fn new(amplitudes: DVector<C64>, dims: SiteDims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), actual: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { amplitudes, dims })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: DVector<C64>, dims: SiteDims) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        PureState::new(amplitudes.unscale(norm), dims)
    }

    pub fn basis(index: usize, dims: SiteDims) -> Result<Self> {
        let n = dims.total();
        if index >= n {
            return Err(Error::InvalidParameter(format!("basis index {index} >= {n}")));
        }
        let mut v = DVector::zeros(n);
        v[index] = C64::new(1.0, 0.0);
        Ok(PureState { amplitudes: v, dims })
    }

    /// Tensor product of normalized single-site vectors.
    pub fn product(factors: &[DVector<C64>]) -> Result<Self> {
        let dims = SiteDims::new(factors.iter().map(|f| f.len()).collect())?;
        let mut amps = DVector::from_element(1, C64::new(1.0, 0.0));
        for f in factors {
            amps = amps.kronecker(f);
        }
        PureState::normalized(amps, dims)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> &SiteDims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    /// Reduced state on `keep`, computed from the amplitudes without forming
    /// the full projector.
    pub fn reduced_state(&self, keep: &[usize]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::InvalidPartition("keep set is empty".into()));
        }
        let (kept, traced) = self.dims.split(keep)?;
        let off_k = self.dims.offsets(&kept);
        let off_t = self.dims.offsets(&traced);
        let m = DMatrix::from_fn(off_k.len(), off_t.len(), |k, t| self.amplitudes[off_k[k] + off_t[t]]);
        Ok(DensityOperator { matrix: &m * m.adjoint(), dims: self.dims.restrict(&kept) })
    }
}

/// Eigen-decomposition `A = V diag(λ) V†` with ascending eigenvalues.
///
/// Each eigenvector is rotated so that its largest-magnitude component (the
/// lowest such index on ties) is real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> DVector<C64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let n = self.len();
        let mut scaled = self.eigenvectors.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        self.map(|x| x)
    }
}

/// Eigenvalues only, unsorted. Runs the QR iteration without a cap.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Eigen-decomposition of a Hermitian matrix (only the lower triangle is read).
pub(crate) fn eigh(m: &DMatrix<C64>) -> Result<SpectralDecomposition> {
    let n = m.nrows();
    let eig = m.clone().try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER).ok_or_else(|| {
        Error::NoConvergence(format!("Hermitian eigensolver did not converge within {EIG_MAX_ITER} sweeps (dim {n})"))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

fn fix_phase(v: &mut DVector<C64>) {
    let max = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    // First component within rounding of the maximum decides the phase.
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-9)).unwrap_or(0);
    let phase = v[pivot] / v[pivot].norm();
    let rot = phase.conj();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Kronecker product with concatenated site dimensions.
pub fn tensor_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    let dims = a.dims.concat(&b.dims)?;
    Ok(HermitianOperator { matrix: a.matrix.kronecker(&b.matrix), dims })
}

/// Traces out every site not in `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::InvalidPartition("keep set is empty".into()));
    }
    let (kept, traced) = rho.dims.split(keep)?;
    let off_k = rho.dims.offsets(&kept);
    let off_t = rho.dims.offsets(&traced);
    let m = &rho.matrix;
    let reduced = DMatrix::from_fn(off_k.len(), off_k.len(), |a, b| {
        off_t.iter().map(|&t| m[(off_k[a] + t, off_k[b] + t)]).sum::<C64>()
    });
    Ok(DensityOperator { matrix: reduced, dims: rho.dims.restrict(&kept) })
}

pub fn eig_hermitian(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    eigh(&a.matrix)
}

/// `-Σ λ ln λ` over the eigenvalues, in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_spectrum(&hermitian_eigenvalues(&rho.matrix))
}

/// Shannon entropy of a probability vector with `0 ln 0 = 0`; entries below
/// [`LOG_CLAMP`] count as zero.
pub fn entropy_of_spectrum(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > LOG_CLAMP).map(|&p| -p * p.ln()).sum::<f64>().max(0.0)
}

/// `S(σ‖ρ) = tr σ (ln σ − ln ρ)`; returns `f64::INFINITY` when the support of
/// `sigma` is not contained in the support of `rho`.
pub fn quantum_relative_entropy(sigma: &DensityOperator, rho: &DensityOperator) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: sigma.dim() });
    }
    let neg_s = -von_neumann_entropy(sigma);
    let rho_eig = eigh(&rho.matrix)?;
    let mut cross = 0.0;
    for (k, &lam) in rho_eig.eigenvalues.iter().enumerate() {
        let v = rho_eig.eigenvectors.column(k);
        let weight = v.dotc(&(&sigma.matrix * v)).re;
        if lam <= LOG_CLAMP {
            if weight > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * lam.ln();
    }
    Ok(neg_s - cross)
}

/// Transposes the factors listed in `subsystem`.
pub fn partial_transpose(rho: &DensityOperator, subsystem: &[usize]) -> Result<HermitianOperator> {
    let (chosen, rest) = rho.dims.split(subsystem)?;
    let off_s = rho.dims.offsets(&chosen);
    let off_r = rho.dims.offsets(&rest);
    let m = &rho.matrix;
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for &as_ in &off_s {
        for &bs in &off_s {
            for &ar in &off_r {
                for &br in &off_r {
                    out[(as_ + ar, bs + br)] = m[(bs + ar, as_ + br)];
                }
            }
        }
    }
    Ok(HermitianOperator { matrix: out, dims: rho.dims.clone() })
}

/// Pauli matrices with eigenvalues ±1.
pub mod pauli {
    use super::C64;
    use nalgebra::DMatrix;

    pub fn i2() -> DMatrix<C64> {
        DMatrix::identity(2, 2)
    }

    pub fn x() -> DMatrix<C64> {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        DMatrix::from_row_slice(2, 2, &[o, l, l, o])
    }

    pub fn y() -> DMatrix<C64> {
        let o = C64::new(0.0, 0.0);
        DMatrix::from_row_slice(2, 2, &[o, C64::new(0.0, -1.0), C64::new(0.0, 1.0), o])
    }

    pub fn z() -> DMatrix<C64> {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        DMatrix::from_row_slice(2, 2, &[l, o, o, -l])
    }
}

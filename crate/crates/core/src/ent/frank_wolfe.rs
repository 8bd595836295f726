//! Conditional-gradient upper bound on the relative entropy of entanglement.
//!
//! Minimizes `f(σ) = S(ρ‖σ) = −S(ρ) − tr ρ ln σ` over fully separable `σ`.
//! The feasible set is the convex hull of product pure states, so the linear
//! subproblem is a product-state maximization of the gradient operator.

use nalgebra::{DMatrix, DVector};

use super::product::{closest_product_state_from, Extremum, ProductSearch};
use super::{EntanglementEstimate, EstimateMethod};
use crate::error::Result;
use crate::qops::{
    eigh, von_neumann_entropy, DensityOperator, HermitianOperator, SpectralDecomposition, C64, LOG_CLAMP,
};

/// Eigenvalue gap below which the divided difference of `ln` is replaced by
/// its derivative `1/λ`.
pub const DIVIDED_DIFFERENCE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FrankWolfeConfig {
    pub max_iter: usize,
    /// Stop once the duality-gap estimate drops below this.
    pub tol: f64,
    /// Weight of the dephased input in the starting point.
    pub mixing_epsilon: f64,
    pub search: ProductSearch,
}

impl Default for FrankWolfeConfig {
    fn default() -> Self {
        FrankWolfeConfig {
            max_iter: 500,
            tol: 1e-4,
            mixing_epsilon: 1e-3,
            // the warm start carries most of the work after the first few iterations
            search: ProductSearch { restarts: 8, ..ProductSearch::default() },
        }
    }
}

/// Full record of a conditional-gradient run.
#[derive(Clone, Debug)]
pub struct FrankWolfeRun {
    pub estimate: EntanglementEstimate,
    /// Best objective after each iteration (nonincreasing).
    pub best_history: Vec<f64>,
    pub gap_history: Vec<f64>,
    pub best_sigma: DensityOperator,
}

/// `tr ρ ln σ` and its gradient `D(ln σ)*[ρ]`, via the Daleckii–Krein formula
/// `G = V (Γ ∘ V†ρV) V†`.
fn log_objective_and_gradient(rho: &DMatrix<C64>, sigma: &SpectralDecomposition) -> (f64, DMatrix<C64>) {
    let v = &sigma.eigenvectors;
    let lam: Vec<f64> = sigma.eigenvalues.iter().map(|&l| l.max(LOG_CLAMP)).collect();
    let rho_eig = v.adjoint() * rho * v;
    let n = lam.len();
    let value: f64 = (0..n).map(|i| rho_eig[(i, i)].re * lam[i].ln()).sum();
    let mut inner = rho_eig;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (lam[i], lam[j]);
            let gamma = if (a - b).abs() < DIVIDED_DIFFERENCE_TOL { 1.0 / a } else { (a / b).ln() / (a - b) };
            inner[(i, j)] *= gamma;
        }
    }
    (value, v * inner * v.adjoint())
}

pub fn frank_wolfe_ree(rho: &DensityOperator, config: &FrankWolfeConfig) -> Result<FrankWolfeRun> {
    let dims = rho.dims().clone();
    let d = rho.dim();
    let s_rho = von_neumann_entropy(rho);
    let eps = config.mixing_epsilon.clamp(0.0, 1.0);
    let mut sigma = DensityOperator::maximally_mixed(dims.clone()).mix(rho.dephased().matrix(), eps);

    let mut best = f64::INFINITY;
    let mut best_sigma = sigma.clone();
    let mut best_history = Vec::new();
    let mut gap_history = Vec::new();
    let mut warm: Option<Vec<DVector<C64>>> = None;
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=config.max_iter.max(1) {
        iterations = t;
        let eig = eigh(sigma.matrix())?;
        let (log_term, grad) = log_objective_and_gradient(rho.matrix(), &eig);
        let objective = (-s_rho - log_term).max(0.0);
        if objective < best {
            best = objective;
            best_sigma = sigma.clone();
        }
        best_history.push(best);

        let g = HermitianOperator::from_hermitized(&grad, dims.clone());
        let (vertex, vertex_value) =
            closest_product_state_from(&g, Extremum::Maximize, &config.search, warm.as_deref());
        let on_sigma = (g.matrix() * sigma.matrix()).trace().re;
        let gap = vertex_value - on_sigma;
        gap_history.push(gap);
        if gap < config.tol {
            converged = true;
            break;
        }

        // Step 2/(t+2) with t starting at 1 keeps the full-rank start in the mixture.
        let gamma = 2.0 / (t as f64 + 2.0);
        let amps = vertex.amplitudes();
        sigma = sigma.mix(&(&amps * amps.adjoint()), gamma);
        warm = Some(vertex.factors);
        debug_assert_eq!(sigma.dim(), d);
    }

    Ok(FrankWolfeRun {
        estimate: EntanglementEstimate {
            lower: 0.0,
            upper: Some(best),
            method: EstimateMethod::FrankWolfeUpper,
            iterations,
            converged,
            cut: None,
        },
        best_history,
        gap_history,
        best_sigma,
    })
}

/// Upper bound on `E(ρ) = min_σ S(ρ‖σ)` over fully separable `σ`.
///
/// The returned estimate carries the trivial lower bound 0; the best objective
/// seen is always a valid upper bound, even when `converged` is false.
pub fn ree_upper_bound(rho: &DensityOperator, config: &FrankWolfeConfig) -> Result<EntanglementEstimate> {
    Ok(frank_wolfe_ree(rho, config)?.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{eigh, quantum_relative_entropy, SiteDims};

    #[test]
    fn gradient_matches_finite_difference() {
        let dims = SiteDims::qubits(2).unwrap();
        let rho = DensityOperator::from_probabilities(&[0.4, 0.1, 0.2, 0.3], dims.clone()).unwrap();
        let mut rho_m = rho.matrix().clone();
        rho_m[(0, 3)] = C64::new(0.1, 0.05);
        rho_m[(3, 0)] = C64::new(0.1, -0.05);
        let sigma = DensityOperator::maximally_mixed(dims.clone()).mix(&rho_m, 0.3);
        let dir = {
            let mut m = DMatrix::<C64>::zeros(4, 4);
            m[(0, 1)] = C64::new(0.02, 0.01);
            m[(1, 0)] = C64::new(0.02, -0.01);
            m[(2, 2)] = C64::new(0.03, 0.0);
            m[(3, 3)] = C64::new(-0.03, 0.0);
            m
        };
        let f = |m: &DMatrix<C64>| log_objective_and_gradient(&rho_m, &eigh(m).unwrap()).0;
        let h = 1e-6;
        let fd = (f(&(sigma.matrix() + &dir * C64::new(h, 0.0))) - f(&(sigma.matrix() - &dir * C64::new(h, 0.0))))
            / (2.0 * h);
        let (_, g) = log_objective_and_gradient(&rho_m, &eigh(sigma.matrix()).unwrap());
        let analytic = (g * &dir).trace().re;
        assert!((fd - analytic).abs() < 1e-7, "{fd} vs {analytic}");
    }

    #[test]
    fn separable_input_is_already_optimal() {
        let rho = DensityOperator::maximally_mixed(SiteDims::qubits(2).unwrap());
        let est = ree_upper_bound(&rho, &FrankWolfeConfig::default()).unwrap();
        assert!(est.upper.unwrap() <= 1e-3);
        assert!(est.converged);
    }

    #[test]
    fn best_history_is_nonincreasing_and_objective_consistent() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]);
        let rho = DensityOperator::from_pure(&crate::qops::PureState::new(amps, SiteDims::qubits(2).unwrap()).unwrap());
        let cfg = FrankWolfeConfig { max_iter: 60, ..Default::default() };
        let run = frank_wolfe_ree(&rho, &cfg).unwrap();
        assert!(run.best_history.windows(2).all(|w| w[1] <= w[0]));
        let direct = quantum_relative_entropy(&rho, &run.best_sigma).unwrap();
        assert!((direct - run.estimate.upper.unwrap()).abs() < 1e-8);
    }
}

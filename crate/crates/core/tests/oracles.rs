mod common;

use nalgebra::DMatrix;
use rand::Rng;

use common::*;
use thermowitness::ent::{closest_product_state, energy_witness, Extremum, ProductSearch};
use thermowitness::gas::{mb_witness_check, omega_tilde_g};
use thermowitness::models::{
    build_spin_hamiltonian, Boundary, ModeSpectrum, ParticleConstraint, SpinModelKind, SpinModelSpec, Statistics,
};
use thermowitness::qops::{eig_hermitian, DensityOperator, HermitianOperator, PureState, SiteDims, C64};
use thermowitness::thermo::thermal_ensemble;

fn qubits2() -> SiteDims {
    SiteDims::qubits(2).unwrap()
}

#[test]
fn separable_minimum_matches_bloch_grid_on_random_hamiltonians() {
    let mut g = rng(21);
    for _ in 0..12 {
        let a = DMatrix::from_fn(4, 4, |_, _| C64::new(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)));
        let m = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        let grid = bloch_grid_sep_min(&m, 180);
        let h = HermitianOperator::new(m, qubits2()).unwrap();
        let w = energy_witness(&h, 0.0, &ProductSearch::default());
        // the search is exact up to convergence; the grid overestimates by its resolution
        assert!(w.sep_min <= grid + 1e-9, "{} > grid {grid}", w.sep_min);
        assert!(grid - w.sep_min <= 1e-3, "{} vs grid {grid}", w.sep_min);
    }
}

#[test]
fn bell_overlap_with_product_states_is_one_half() {
    let z = c(0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = PureState::new(nalgebra::DVector::from_vec(vec![c(s), z, z, c(s)]), qubits2()).unwrap();
    let proj = DensityOperator::from_pure(&bell).to_hermitian();
    let (_, v) = closest_product_state(&proj, Extremum::Maximize, &ProductSearch::default());
    // maximum overlap over product states is the maximum of −⟨−P⟩ on the grid
    let neg = -proj.matrix().clone();
    let grid = -bloch_grid_sep_min(&neg, 180);
    assert!((v - 0.5).abs() < 1e-9);
    assert!((grid - 0.5).abs() < 1e-4);
}

#[test]
fn two_site_spectra_match_closed_forms() {
    let (j, h) = (0.8, 0.6);
    let ising =
        build_spin_hamiltonian(&SpinModelSpec::new(SpinModelKind::TransverseIsing, 2, j, h, Boundary::Open)).unwrap();
    let r = (j * j + 4.0 * h * h).sqrt();
    let mut want = vec![-r, -j, j, r];
    want.sort_by(f64::total_cmp);
    let got = eig_hermitian(&ising).unwrap().eigenvalues;
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12, "{got:?} vs {want:?}");
    }

    let heis =
        build_spin_hamiltonian(&SpinModelSpec::new(SpinModelKind::Heisenberg, 2, 1.0, 0.0, Boundary::Open)).unwrap();
    for t in [0.05, 0.3, 1.0, 3.64, 20.0] {
        let ens = thermal_ensemble(&heis, t).unwrap();
        assert!((ens.entropy() - heisenberg2_entropy(t)).abs() < 1e-12);
        let neg_ln_p = -thermowitness::thermo::ground_weight(&ens).ln();
        assert!((neg_ln_p - heisenberg2_neg_ln_p(t)).abs() < 1e-12);
    }
}

#[test]
fn thermal_scalars_match_unshifted_sums() {
    let mut g = rng(22);
    for _ in 0..20 {
        let levels = random_levels(&mut g, 12);
        let h = HermitianOperator::from_real_diagonal(&levels, SiteDims::new(vec![12]).unwrap()).unwrap();
        for t in [0.5, 2.0, 30.0] {
            let ens = thermal_ensemble(&h, t).unwrap();
            let (p, s, u) = naive_canonical(&levels, t);
            assert!((ens.entropy() - s).abs() < 1e-10);
            assert!((ens.internal_energy() - u).abs() < 1e-10);
            assert!((thermowitness::thermo::ground_weight(&ens) - p).abs() < 1e-12);
        }
    }
}

#[test]
fn classical_estimate_by_direct_substitution() {
    let spec = ModeSpectrum::new(vec![1.0; 4], Statistics::Boltzmann, ParticleConstraint::Number(4.0)).unwrap();
    let c = mb_witness_check(&spec, 4.0, 2.0).unwrap();
    assert!((c.s_mb - 4.0 * (1.0 + 2f64.ln())).abs() < 1e-12);
    assert!(!c.fires);

    let freqs = [0.2, 0.9, 1.7, 3.1, 5.0];
    let n = 3.0;
    let spec = ModeSpectrum::new(freqs.to_vec(), Statistics::Bose, ParticleConstraint::Number(n)).unwrap();
    let w_g = (freqs.iter().map(|w: &f64| w.ln()).sum::<f64>() / n).exp();
    assert!((omega_tilde_g(&spec, n) - w_g).abs() < 1e-12 * w_g);
    for t in log_grid(w_g, 100.0 * w_g, 50) {
        let t = t.max(omega_tilde_g(&spec, n));
        let c = mb_witness_check(&spec, n, t).unwrap();
        assert!((c.s_mb - n * (1.0 + (t / w_g).ln())).abs() < 1e-9);
        assert!(!c.fires);
    }
}

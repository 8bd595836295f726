//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: entropies come from SVDs or
//! closed forms, separable minima from explicit Bloch-sphere grids.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thermowitness::qops::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Random complex vector, Gaussian entries, normalized.
pub fn random_state(g: &mut ChaCha8Rng, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| {
        // Box-Muller keeps this free of the library's sampler
        let (u1, u2): (f64, f64) = (g.random_range(1e-12..1.0), g.random_range(0.0..1.0));
        let r = (-2.0 * u1.ln()).sqrt();
        C64::new(r * (std::f64::consts::TAU * u2).cos(), r * (std::f64::consts::TAU * u2).sin())
    });
    let n = v.norm();
    v.unscale(n)
}

/// Entanglement entropy of a bipartite pure state from its Schmidt
/// coefficients (amplitudes reshaped to `da × db`, row-major in `a`).
pub fn schmidt_entropy(amps: &DVector<C64>, da: usize, db: usize) -> f64 {
    let m = DMatrix::from_fn(da, db, |i, j| amps[i * db + j]);
    m.singular_values().iter().map(|s| s * s).filter(|&p| p > 1e-300).map(|p| -p * p.ln()).sum()
}

/// Levels `(−3, 1, 1, 1)` of the two-site Heisenberg coupling.
pub fn heisenberg2_entropy(t: f64) -> f64 {
    let b = 1.0 / t;
    // shift by the ground level for stability
    let w = 3.0 * (-4.0 * b).exp();
    let z = 1.0 + w;
    let excess = 4.0 * w / z;
    z.ln() + b * excess
}

pub fn heisenberg2_neg_ln_p(t: f64) -> f64 {
    (1.0 + 3.0 * (-4.0 / t).exp()).ln()
}

/// Bisection for the root of a decreasing-to-increasing crossing `f(lo) < 0 < f(hi)`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn pauli(k: usize) -> DMatrix<C64> {
    let z = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => DMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c(1.0)]),
        1 => DMatrix::from_row_slice(2, 2, &[z, c(1.0), c(1.0), z]),
        2 => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => DMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c(-1.0)]),
    }
}

/// Minimum of `⟨a⊗b|H|a⊗b⟩` over two-qubit product states: the first Bloch
/// vector on a `grid × grid` (θ, φ) mesh, the second minimized in closed form.
pub fn bloch_grid_sep_min(h: &DMatrix<C64>, grid: usize) -> f64 {
    assert_eq!(h.nrows(), 4);
    // H = Σ c_ab σa ⊗ σb with c_ab = tr(H σa⊗σb)/4
    let mut coef = [[0.0f64; 4]; 4];
    for (a, row) in coef.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = (h * pauli(a).kronecker(&pauli(b))).trace().re / 4.0;
        }
    }
    let mut best = f64::INFINITY;
    for i in 0..=grid {
        let theta = std::f64::consts::PI * i as f64 / grid as f64;
        for j in 0..grid {
            let phi = std::f64::consts::TAU * j as f64 / grid as f64;
            let n = [1.0, theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            // effective single-qubit operator: c0 + v·σ
            let mut v = [0.0; 4];
            for (b, vb) in v.iter_mut().enumerate() {
                *vb = (0..4).map(|a| coef[a][b] * n[a]).sum();
            }
            let e = v[0] - (v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt();
            best = best.min(e);
        }
    }
    best
}

/// Ascending random spectrum with `n` levels in `[-5, 5)`.
pub fn random_levels(g: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| g.random_range(-5.0..5.0)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Direct Boltzmann sums without any shift (valid for moderate β·spread).
pub fn naive_canonical(levels: &[f64], t: f64) -> (f64, f64, f64) {
    let ws: Vec<f64> = levels.iter().map(|e| (-e / t).exp()).collect();
    let z: f64 = ws.iter().sum();
    let u = levels.iter().zip(&ws).map(|(e, w)| e * w).sum::<f64>() / z;
    let f = -t * z.ln();
    let p = ws[0] / z;
    (p, (u - f) / t, u)
}

/// Temperature-dependent part of the grand potential. For fermions the filled
/// modes contribute a constant `Σ (ω − μ)`, which is dropped so that finite
/// differences keep full relative precision when `S` is tiny.
pub fn thermal_grand_potential_oracle(freqs: &[f64], bose: bool, mu: f64, t: f64) -> f64 {
    freqs
        .iter()
        .map(|&w| {
            let x = (w - mu) / t;
            if bose {
                t * (-(-x).exp()).ln_1p()
            } else {
                -t * (-x.abs()).exp().ln_1p()
            }
        })
        .sum()
}

/// Grand potential summed mode by mode, written independently of the library.
pub fn grand_potential_oracle(freqs: &[f64], bose: bool, mu: f64, t: f64) -> f64 {
    freqs
        .iter()
        .map(|&w| {
            let x = (w - mu) / t;
            if bose {
                t * (-(-x).exp()).ln_1p()
            } else if x > 0.0 {
                -t * (-x).exp().ln_1p()
            } else {
                -t * (-x + x.exp().ln_1p())
            }
        })
        .sum()
}

//! Built-in property suite run by `thermowitness selfcheck`.

use rand::Rng;

use super::output::format_float;
use crate::gas::{gas_entropy, grand_potential, GasState};
use crate::models::{
    build_spin_hamiltonian, Boundary, ModeSpectrum, ParticleConstraint, SpinModelKind, SpinModelSpec, Statistics,
};
use crate::rng;
use crate::thermo::{check_eq3_scalars, CanonicalScalars};
use crate::witness::{sweep, SweepSettings};

/// Acceptance thresholds. Tests corrupt these to exercise the failure path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfcheckTolerances {
    /// Allowed violation of `p ≥ e^{−S}` and of `β(U − E₀) ≥ 0`.
    pub eq3: f64,
    /// Relative mismatch between `−Σ w ln w` and `(U − F)/T`.
    pub entropy_identity: f64,
    /// Relative mismatch between the mode-sum entropy and `−∂F/∂T`.
    pub gas_derivative: f64,
}

impl Default for SelfcheckTolerances {
    fn default() -> Self {
        SelfcheckTolerances { eq3: 1e-10, entropy_identity: 1e-9, gas_derivative: 1e-5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest observed violation (or mismatch) across the cases.
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfcheckReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{tag}] {}: {} cases, worst {}\n", c.name, c.cases, format_float(c.worst)));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} of {} checks passed\n", self.checks.len() - failed, self.checks.len()));
        out
    }
}

const SPECTRA: u64 = 50;
const TEMPS: usize = 20;
const GAS_SPECTRA: u64 = 10;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn random_levels(seed: u64, k: u64) -> Vec<f64> {
    let mut g = rng::stream(seed, k);
    let n = g.random_range(4..=64);
    let mut levels: Vec<f64> = (0..n).map(|_| g.random_range(-5.0..5.0)).collect();
    levels.sort_by(f64::total_cmp);
    levels
}

fn canonical_checks(seed: u64, tol: &SelfcheckTolerances) -> [CheckOutcome; 2] {
    let temps = log_grid(1e-3, 1e3, TEMPS);
    let (mut eq3_worst, mut id_worst, mut cases) = (0.0f64, 0.0f64, 0usize);
    let mut ok = true;
    for k in 0..SPECTRA {
        let levels = random_levels(seed, k);
        for &t in &temps {
            cases += 1;
            let Ok(s) = CanonicalScalars::new(&levels, t) else {
                ok = false;
                continue;
            };
            let c = check_eq3_scalars(&s);
            eq3_worst = eq3_worst.max(c.exp_neg_s - c.p).max(-c.slack);
            let via_f = (s.internal_energy - s.free_energy) / t;
            id_worst = id_worst.max((s.entropy - via_f).abs() / s.entropy.max(1.0));
        }
    }
    [
        CheckOutcome { name: "eq3_chain", passed: ok && eq3_worst <= tol.eq3, cases, worst: eq3_worst },
        CheckOutcome {
            name: "entropy_identity",
            passed: ok && id_worst <= tol.entropy_identity,
            cases,
            worst: id_worst,
        },
    ]
}

fn gas_check(seed: u64, tol: &SelfcheckTolerances) -> CheckOutcome {
    let temps = log_grid(0.01, 100.0, 10);
    let (mut worst, mut cases, mut ok) = (0.0f64, 0usize, true);
    for k in 0..GAS_SPECTRA {
        let mut g = rng::stream(seed, 1_000 + k);
        let m = g.random_range(8..=64);
        let mut freqs: Vec<f64> = (0..m).map(|_| g.random_range(0.05..5.0)).collect();
        freqs.sort_by(f64::total_cmp);
        for stats in [Statistics::Bose, Statistics::Fermi] {
            let mu = match stats {
                Statistics::Fermi => freqs[m / 2],
                _ => 0.5 * freqs[0],
            };
            let Ok(spec) = ModeSpectrum::new(freqs.clone(), stats, ParticleConstraint::ChemicalPotential(mu)) else {
                ok = false;
                continue;
            };
            for &t in &temps {
                cases += 1;
                let d = 1e-4 * t;
                let f = |t: f64| grand_potential(&freqs, stats, mu, t);
                let (Ok(fp), Ok(fm), Ok(st)) = (f(t + d), f(t - d), GasState::resolve(&spec, t)) else {
                    ok = false;
                    continue;
                };
                let fd = -(fp - fm) / (2.0 * d);
                let s = gas_entropy(&st);
                worst = worst.max((fd - s).abs() / s.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    CheckOutcome { name: "gas_entropy_derivative", passed: ok && worst <= tol.gas_derivative, cases, worst }
}

fn implication_check(seed: u64) -> CheckOutcome {
    let temps = log_grid(0.01, 100.0, TEMPS);
    let kinds = [SpinModelKind::Heisenberg, SpinModelKind::Xy, SpinModelKind::TransverseIsing];
    let (mut violations, mut cases) = (0usize, 0usize);
    for (k, kind) in kinds.iter().cycle().take(12).enumerate() {
        let mut g = rng::stream(seed, 2_000 + k as u64);
        let n = 2 + k % 4;
        let spec = SpinModelSpec::new(*kind, n, g.random_range(0.5..1.5), g.random_range(0.0..1.5), Boundary::Open);
        let h = match build_spin_hamiltonian(&spec) {
            Ok(h) => h,
            Err(_) => {
                violations += 1;
                continue;
            }
        };
        match sweep(&h, &temps, &SweepSettings::default()) {
            Ok(res) => {
                cases += res.reports.len();
                violations += res.reports.iter().filter(|r| r.eq4_fires && !r.eq2_fires).count();
            }
            Err(_) => {
                cases += temps.len();
                violations += 1;
            }
        }
    }
    CheckOutcome { name: "eq4_implies_eq2", passed: violations == 0, cases, worst: violations as f64 }
}

/// Runs every property on inputs derived from `seed`.
pub fn run_selfcheck_with(seed: u64, tol: &SelfcheckTolerances) -> SelfcheckReport {
    let [eq3, identity] = canonical_checks(seed, tol);
    SelfcheckReport { checks: vec![eq3, identity, gas_check(seed, tol), implication_check(seed)] }
}

pub fn run_selfcheck(seed: u64) -> SelfcheckReport {
    run_selfcheck_with(seed, &SelfcheckTolerances::default())
}

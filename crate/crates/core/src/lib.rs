//! Entropy-based entanglement witnesses for thermal many-body states.
//!
//! A thermal state `ρ_T` is certified entangled when its entropy (or the
//! negative log of its ground-state weight) falls below the relative entropy
//! of entanglement of the ground state. The crate provides the pieces needed
//! to evaluate that comparison:
//!
//! * [`qops`]: dense Hermitian linear algebra, partial traces, entropies.
//! * [`models`]: spin-chain Hamiltonians and free-mode spectra.
//! * [`thermo`]: canonical-ensemble quantities.
//! * [`ent`]: entanglement bounds, the separable-energy witness, PPT test.
//! * [`witness`]: witness evaluation, temperature sweeps, critical temperatures.
//! * [`gas`]: ideal Bose/Fermi/classical gas thermodynamics and scaling fits.
//! * [`cli`]: the command-line front end.
//!
//! Conventions: `k_B = ħ = 1`, temperatures in energy units, entropies in nats.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ent;
pub mod error;
pub mod gas;
pub mod models;
pub mod qops;
pub mod rng;
pub mod thermo;
pub mod witness;

pub use error::{Error, Result};

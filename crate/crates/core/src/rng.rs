//! Seeded random streams.
//!
//! Every consumer derives its generator from the run seed plus a stream
//! index, so results do not depend on scheduling order.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::qops::C64;

pub const DEFAULT_SEED: u64 = 42;

/// Independent generator number `stream` of the family rooted at `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-random unit vector of length `dim`.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

//! Reproducible random streams.
//!
//! Every trajectory draws from its own ChaCha stream selected by the
//! trajectory index, so the numbers a run sees do not depend on how the
//! runs are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
    offset: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, offset: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A disjoint family of streams under the same master seed, for
    /// independent estimators that are combined later.
    pub fn fork(&self, tag: u64) -> Self {
        Self { seed: self.seed, offset: self.offset.wrapping_add(tag.wrapping_mul(1 << 40)) }
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.offset.wrapping_add(index));
        rng
    }
}

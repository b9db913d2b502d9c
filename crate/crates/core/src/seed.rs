//! Seed derivation. Every consumer of randomness (a tree, a fold split, a
//! stacking cell) gets its own seed derived from a base seed and a stream
//! id, so results do not depend on evaluation order or thread count.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function applied to `base ^ stream`.
///
/// For a fixed base this is a bijection of `stream`, so distinct streams
/// always give distinct seeds.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = (base ^ stream).wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

static PROCESS_SEED: OnceLock<u64> = OnceLock::new();

/// Seed drawn from system entropy the first time it is needed, then fixed
/// for the lifetime of the process.
pub fn process_seed() -> u64 {
    *PROCESS_SEED.get_or_init(|| {
        let seed = rand::random::<u64>();
        log::info!("no seed given; drew process seed {seed}");
        seed
    })
}

/// Base seed of an estimator or run. `None` means "use the process seed".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec(pub Option<u64>);

impl SeedSpec {
    pub fn fixed(seed: u64) -> Self {
        Self(Some(seed))
    }

    pub fn absent() -> Self {
        Self(None)
    }

    pub fn resolve(self) -> u64 {
        self.0.unwrap_or_else(process_seed)
    }
}

impl From<u64> for SeedSpec {
    fn from(seed: u64) -> Self {
        Self(Some(seed))
    }
}

//! Counter-based splittable random streams.
//!
//! A stream is a `(key, counter)` pair; each draw is a SplitMix64 finalizer
//! applied to `key + counter * GAMMA`. Substreams derive a fresh key from the
//! parent key and a label only, so the draws a consumer sees never depend on
//! how many values other consumers pulled first.

use serde::{Deserialize, Serialize};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0x6A09_E667_F3BC_C909;
const LABEL_SALT: u64 = 0xBB67_AE85_84CA_A73B;

#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rng {
    key: u64,
    counter: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            key: mix64(seed ^ SEED_SALT),
            counter: 0,
        }
    }

    /// Independent child stream. Depends only on this stream's key and
    /// `label`, never on its counter.
    #[inline]
    pub fn substream(&self, label: u64) -> Rng {
        let label_key = mix64(label.wrapping_mul(GAMMA) ^ LABEL_SALT);
        Rng {
            key: mix64(self.key ^ label_key).wrapping_add(label_key.rotate_left(17)),
            counter: 0,
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    #[inline]
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

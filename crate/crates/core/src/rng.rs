//! Seed derivation for reproducible, splittable random streams.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed for `index` under `base`.
#[inline]
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

#[inline]
pub fn substream(base: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(base, index))
}

pub(crate) const INIT_SALT: u64 = 0x696e_6974;
pub(crate) const EPOCH_SALT: u64 = 0x6570_6f63_6800_0000;

//! Seedable, splittable randomness.
//!
//! Every randomized routine takes its generator explicitly. Child streams are
//! derived by drawing a fresh 256-bit seed from the parent, so a session is a
//! pure function of its root seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// The generator used throughout the crate.
pub type SklRng = ChaCha20Rng;

/// Builds the root generator for a numeric seed.
pub fn rng_from_seed(seed: u64) -> SklRng {
    SklRng::seed_from_u64(seed)
}

/// Derives an independent child generator from `parent`.
pub fn split<R: RngCore + ?Sized>(parent: &mut R) -> SklRng {
    let mut seed = [0u8; 32];
    parent.fill_bytes(&mut seed);
    SklRng::from_seed(seed)
}

/// Derives one child generator per index, in index order.
pub fn split_n<R: RngCore + ?Sized>(parent: &mut R, count: usize) -> Vec<SklRng> {
    (0..count).map(|_| split(parent)).collect()
}

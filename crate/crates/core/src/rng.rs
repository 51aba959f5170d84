//! Seed derivation.
//!
//! Every randomized sub-task (class splits, undersampling, one stream per
//! screened variable, ...) draws from its own stream derived as
//! `hash(master_seed, task_tag)`. Streams therefore never interfere: adding,
//! removing or reordering sub-tasks cannot perturb the draws of another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a ChaCha8 generator keyed by `(master_seed, tag)`.
pub fn derive_rng(master_seed: u64, tag: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(tag.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Derive a plain `u64` sub-seed for APIs that take seeds rather than
/// generators.
pub fn derive_seed(master_seed: u64, tag: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([0x2e]);
    hasher.update(tag.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Generator for a single seed value (no tag).
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

//! Deterministic RNG substreams.
//!
//! Work that is distributed over documents or iteration chunks must not
//! depend on scheduling order, so each unit derives its own stream from the
//! run seed and a stable label (document id, chunk index). The derivation
//! hashes `(seed, label)` with SHA-256 into a ChaCha12 key; neither the
//! process hasher state nor thread interleaving can influence it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// RNG for the substream identified by `label` under `seed`.
pub fn rng_for(seed: u64, label: &str) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}

//! Reproducible RNG streams for parallel Monte Carlo.
//!
//! Each (experiment seed, replica, box) triple maps to an independent
//! ChaCha8 stream via a SHA-256 key derivation, so results do not depend
//! on scheduling or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// RNG stream keyed by (experiment seed, replica index, box index).
pub fn stream(seed: u64, replica: u64, box_index: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(replica.to_le_bytes());
    hasher.update(box_index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

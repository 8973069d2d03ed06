//! Seeded random number generation.
//!
//! Every stochastic operation uses [`ChaCha20Rng`] (256-bit key, 64-bit
//! stream id, 64-bit block counter). A plain `u64` seed is expanded with
//! `SeedableRng::seed_from_u64`.
//!
//! Independent tasks derive their own seed from a master seed and a task
//! label with [`derive_seed`]: the first eight bytes (little endian) of
//! `SHA-256(master.to_le_bytes() || label)`. Labels are names rather than
//! positions, so adding or reordering tasks never changes the stream of an
//! existing one.

use rand::SeedableRng;
pub use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub fn seeded(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

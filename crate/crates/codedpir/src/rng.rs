//! Seed splitting: every random stream derives from one 64-bit seed plus a label,
//! using ChaCha's native stream counter, so runs replay bit-exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// Seed from `CODEDPIR_SEED` when set, else the default.
pub fn env_seed() -> u64 {
    std::env::var("CODEDPIR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Independent stream for (`seed`, `label`, `index`).
pub fn stream(seed: u64, label: &str, index: u64) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(label.as_bytes());
    let digest = h.finalize();
    let tag = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(tag ^ index.rotate_left(32));
    rng
}

/// Hex SHA-256 of a symbol sequence (transcript fingerprints).
pub fn digest_symbols(symbols: &[u64]) -> String {
    let mut h = Sha256::new();
    for s in symbols {
        h.update(s.to_le_bytes());
    }
    hex::encode(h.finalize())
}

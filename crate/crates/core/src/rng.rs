//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream whose 256-bit key
//! is the tuple `(master seed, trial index, stream tag, salt)`. A trial's output
//! therefore depends only on its own key, never on which worker ran it or in
//! which order trials were scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one independent trial within a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialKey {
    pub master: u64,
    pub trial: u64,
    /// Separates campaigns that share a master seed (e.g. different window sizes).
    pub salt: u64,
}

impl TrialKey {
    pub fn new(master: u64, trial: u64) -> Self {
        Self { master, trial, salt: 0 }
    }

    pub fn with_salt(mut self, salt: u64) -> Self {
        self.salt = salt;
        self
    }

    /// Generator for one named stream of this trial.
    pub fn stream(&self, tag: u64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master.to_le_bytes());
        seed[8..16].copy_from_slice(&self.trial.to_le_bytes());
        seed[16..24].copy_from_slice(&tag.to_le_bytes());
        seed[24..].copy_from_slice(&self.salt.to_le_bytes());
        ChaCha8Rng::from_seed(seed)
    }
}

/// Stream tags. Leaf batches use `LEAF_BATCH + batch index`.
pub mod tags {
    pub const LEAF_BATCH: u64 = 0;
    pub const SAMPLE_POINTS: u64 = 1 << 40;
    pub const PROBE: u64 = 1 << 41;
    pub const AUX: u64 = 1 << 42;
}

/// SplitMix64 finalizer, used to fold parameters into a salt.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Salt derived from a list of real parameters (bit patterns, order-sensitive).
pub fn salt_of(params: &[f64]) -> u64 {
    params
        .iter()
        .fold(0x5eed_u64, |acc, v| mix64(acc ^ v.to_bits()))
}

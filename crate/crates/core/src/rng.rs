//! Reproducible, hierarchically addressed random streams.
//!
//! A [`RandomStream`] is a `(seed, cell, replicate)` address. The seed and
//! cell index form the ChaCha key and the replicate index selects the ChaCha
//! stream, so every address maps to its own counter-based sequence and no
//! state is shared between workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator handed out by [`RandomStream::rng`].
pub type StreamRng = ChaCha8Rng;

const DOMAIN_TAG: u64 = 0x7061_6972_7369_6731; // "pairsig1"

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomStream {
    pub seed: u64,
    pub cell: u64,
    pub replicate: u64,
}

impl RandomStream {
    pub const fn new(seed: u64) -> Self {
        Self {
            seed,
            cell: 0,
            replicate: 0,
        }
    }

    /// Sub-stream for a grid cell (or any other first-level unit).
    pub const fn cell(self, cell: u64) -> Self {
        Self { cell, ..self }
    }

    /// Sub-stream for a replicate within the current cell.
    pub const fn replicate(self, replicate: u64) -> Self {
        Self { replicate, ..self }
    }

    pub fn rng(&self) -> StreamRng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.cell.to_le_bytes());
        key[16..24].copy_from_slice(&DOMAIN_TAG.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.replicate);
        rng
    }
}

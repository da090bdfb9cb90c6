//! Keyed, counter-based random streams.
//!
//! Every node of every sample reads from its own stream. The stream key is
//! derived from `(seed, node name)`, the ChaCha stream id is the sample index
//! and the word position plays the role of the draw counter, so any draw is a
//! pure function of `(seed, node, sample_index, draw_counter)`.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

const KEY_DOMAIN: &[u8] = b"dagforge/stream/v1";

/// 256-bit key for one node's family of per-sample streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey([u8; 32]);

impl StreamKey {
    pub fn derive(seed: u64, node: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(KEY_DOMAIN);
        hasher.update(seed.to_le_bytes());
        hasher.update((node.len() as u64).to_le_bytes());
        hasher.update(node.as_bytes());
        StreamKey(hasher.finalize().into())
    }
}

/// Random stream for one node within one sample.
#[derive(Debug, Clone)]
pub struct RandomStream {
    key: StreamKey,
    sample_index: u64,
    draw_counter: u64,
    core: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(key: StreamKey, sample_index: u64) -> Self {
        let mut core = ChaCha20Rng::from_seed(key.0);
        core.set_stream(sample_index);
        RandomStream {
            key,
            sample_index,
            draw_counter: 0,
            core,
        }
    }

    /// Stream for an ad-hoc `(seed, label)` pair, handy outside a simulation.
    pub fn from_seed(seed: u64, label: &str, sample_index: u64) -> Self {
        RandomStream::new(StreamKey::derive(seed, label), sample_index)
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    pub fn sample_index(&self) -> u64 {
        self.sample_index
    }

    /// Number of raw 64-bit draws consumed so far.
    pub fn draw_counter(&self) -> u64 {
        self.draw_counter
    }

    /// One raw 64-bit draw.
    pub fn next_raw(&mut self) -> u64 {
        self.draw_counter += 1;
        self.core.next_u64()
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision; one raw draw.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_raw() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`; one raw draw. `bound` must be > 0.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_raw() as u128 * bound as u128) >> 64) as u64
    }
}

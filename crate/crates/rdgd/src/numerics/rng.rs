//! Counter-based random stream splitting.
//!
//! Every consumer of randomness owns a stream derived from the path
//! `(root seed, trial, round t, worker, direction)`. The path is packed
//! injectively into a ChaCha8 key, so streams with distinct paths are
//! independent and the order in which workers are evaluated (or trials are
//! scheduled) never changes any draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Which leg of the protocol a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Server -> worker parameter broadcast noise.
    Downlink,
    /// Worker -> server gradient noise.
    Uplink,
    /// Adversary's per-round allocation draws.
    Adversary,
    /// Dataset synthesis and subsampling.
    Data,
}

impl Direction {
    fn tag(self) -> u8 {
        match self {
            Direction::Downlink => 1,
            Direction::Uplink => 2,
            Direction::Adversary => 3,
            Direction::Data => 4,
        }
    }
}

/// Pack the derivation path into a 32-byte ChaCha key. The packing is
/// injective for trial, round, and worker below 2^32, which keeps distinct
/// paths on provably distinct keys.
fn derive_key(seed: u64, trial: u64, t: u64, worker: u64, dir: Direction) -> [u8; 32] {
    assert!(trial < (1 << 32) && t < (1 << 32) && worker < (1 << 32), "derivation path out of range");
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..12].copy_from_slice(&(trial as u32).to_le_bytes());
    key[12..16].copy_from_slice(&(t as u32).to_le_bytes());
    key[16..20].copy_from_slice(&(worker as u32).to_le_bytes());
    key[20] = dir.tag();
    // Fixed domain separator so the all-zero path is not the all-zero key.
    key[21..32].copy_from_slice(b"rdgd-stream");
    key
}

/// Root of the derivation tree: one per (seed, trial) pair.
#[derive(Debug, Clone, Copy)]
pub struct RngRoot {
    pub seed: u64,
    pub trial: u64,
}

impl RngRoot {
    pub fn new(seed: u64, trial: u64) -> Self {
        RngRoot { seed, trial }
    }

    pub fn stream(&self, t: usize, worker: usize, dir: Direction) -> RngStream {
        RngStream::from_path(self.seed, self.trial, t as u64, worker as u64, dir)
    }
}

/// A single independent random stream.
pub struct RngStream {
    rng: ChaCha8Rng,
    key: [u8; 32],
}

impl RngStream {
    pub fn from_path(seed: u64, trial: u64, t: u64, worker: u64, dir: Direction) -> Self {
        let key = derive_key(seed, trial, t, worker, dir);
        RngStream { rng: ChaCha8Rng::from_seed(key), key }
    }

    /// The derived key; distinct paths yield distinct keys.
    pub fn key(&self) -> &[u8; 32] {
        &self.key
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// p i.i.d. draws from N(0, sigma^2). A zero sigma yields the zero
    /// vector without consuming the stream.
    pub fn gaussian_vector(&mut self, p: usize, sigma: f64) -> Vec<f64> {
        assert!(sigma >= 0.0, "sigma must be nonnegative");
        if sigma == 0.0 {
            return vec![0.0; p];
        }
        (0..p).map(|_| sigma * self.standard_normal()).collect()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.rng.random_range(0..=i);
            items.swap(i, j);
        }
    }
}

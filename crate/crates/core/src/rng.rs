//! Reproducible random streams.
//!
//! Every stream is a ChaCha20 generator (the `rand_chacha` reference
//! implementation of Bernstein's cipher used as a counter-based PRNG). The
//! 256-bit key is expanded from the 64-bit master seed by
//! `SeedableRng::seed_from_u64`, and the substream index selects the ChaCha
//! stream (nonce). Identical `(master_seed, substream)` pairs therefore
//! produce identical sequences on every platform, and distinct substreams
//! are disjoint keystreams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Name recorded in output metadata so results can be tied to the generator.
pub const ALGORITHM: &str = "chacha20/seed_from_u64+stream";

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    substream: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, substream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(master_seed);
        inner.set_stream(substream);
        Self {
            master_seed,
            substream,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn substream(&self) -> u64 {
        self.substream
    }

    /// Uniform draw on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw on `[lo, hi)`; returns `lo` when the range is degenerate.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        let x = lo + (hi - lo) * self.uniform();
        // rounding can push lo + w*u onto hi
        if x >= hi {
            lo.max(hi - (hi - lo) * f64::EPSILON)
        } else {
            x
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

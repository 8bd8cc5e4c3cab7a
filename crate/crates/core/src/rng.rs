//! Reproducible randomness: counter-based ChaCha8 streams split from a
//! 64-bit master seed.
//!
//! Stream discipline: independent work item `i` (a Monte Carlo trial, a
//! randomized test case) draws from `Stream::new(master_seed, i)`. Streams
//! never migrate between work items, so aggregate results are independent of
//! scheduling and worker count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One random stream, derived from `(master_seed, stream_index)`.
pub struct Stream(ChaCha8Rng);

fn expand_seed(seed: u64) -> [u8; 32] {
    // splitmix64 chain; fills the ChaCha key deterministically
    let mut out = [0u8; 32];
    let mut s = seed;
    for chunk in out.chunks_mut(8) {
        s = s.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    out
}

impl Stream {
    pub fn new(master_seed: u64, stream_index: u64) -> Stream {
        let mut rng = ChaCha8Rng::from_seed(expand_seed(master_seed));
        rng.set_stream(stream_index);
        Stream(rng)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in 0..n, unbiased by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        if n.is_power_of_two() {
            return self.next_u64() & (n - 1);
        }
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}

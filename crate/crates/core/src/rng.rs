//! Seeded, splittable random streams.
//!
//! A [`RandomStream`] is identified by a 64-bit key. Splitting derives a child
//! key from the parent key and an index only, so the children of a stream do
//! not depend on how many values the parent has already produced. Parallel
//! tasks each receive their own child and results are independent of the
//! worker count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Default seed used by the command line when none is given.
pub const DEFAULT_SEED: u64 = 0x0dd5_eed5_2016_0003;

#[derive(Clone, Debug)]
pub struct RandomStream {
    key: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        let key = splitmix64(seed);
        Self { key, inner: ChaCha8Rng::seed_from_u64(key) }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Child stream number `index`. Pure in `(self.key, index)`.
    pub fn split(&self, index: u64) -> Self {
        let key = splitmix64(self.key ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)));
        Self { key, inner: ChaCha8Rng::seed_from_u64(key) }
    }

    /// Child stream addressed by a string label and an index.
    pub fn split_named(&self, label: &str, index: u64) -> Self {
        let h = label.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        self.split(h).split(index)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on (0, 1].
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for RandomStream {
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

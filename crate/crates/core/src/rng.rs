//! Deterministic random streams.
//!
//! Every stochastic step in this crate draws from [`Rng`], a xoshiro256++
//! generator seeded through SplitMix64. Both algorithms are public-domain
//! and fully pinned here so that ports in other languages can reproduce
//! the exact same streams:
//!
//! * SplitMix64: `state += 0x9E3779B97F4A7C15`, then the 30/27/31
//!   xor-multiply finalizer. From seed 0 the first output is
//!   `0xE220A8397B1DCDAF`.
//! * xoshiro256++ state is the first four SplitMix64 outputs of the seed.
//! * `next_f64` takes the top 53 bits: `(x >> 11) * 2^-53`, in `[0, 1)`.
//! * `next_gaussian` is the trigonometric Box-Muller transform,
//!   `sqrt(-2 ln u1) * cos(2 pi u2)` with `u1 = 1 - next_f64()`.
//! * Sub-streams come from [`child_seed`], which is the `(index+1)`-th
//!   SplitMix64 output of the parent seed.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

const GAMMA: u64 = 0x9E3779B97F4A7C15;

#[inline]
fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream, used for seeding and seed derivation.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        splitmix64_mix(self.state)
    }
}

/// Derive an independent child seed: the `(index+1)`-th SplitMix64 output
/// of `seed`, computed in O(1).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// xoshiro256++ generator.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        Self {
            s: [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()],
        }
    }

    /// Generator for sub-stream `index` of `seed` (see [`child_seed`]).
    pub fn for_stream(seed: u64, index: u64) -> Self {
        Self::new(child_seed(seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Log-uniform in `[lo, hi)`; requires `0 < lo <= hi`.
    pub fn log_range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        (self.range_f64(lo.ln(), hi.ln())).exp()
    }

    /// Uniform integer in `[0, n)` via the multiply-shift reduction
    /// `(x * n) >> 64`.
    pub fn range_usize(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal via Box-Muller (cosine branch). Consumes exactly
    /// two uniforms per call; no caching, so streams stay positionable.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
    }

    /// Fisher-Yates shuffle, iterating from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.range_usize(i + 1);
            items.swap(i, j);
        }
    }

    /// A random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        self.shuffle(&mut idx);
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix64_reference_vector() {
        let mut sm = SplitMix64::new(0);
        assert_eq!(sm.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(sm.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(sm.next_u64(), 0x06C45D188009454F);
    }

    #[test]
    fn child_seed_matches_splitmix_stream() {
        let mut sm = SplitMix64::new(42);
        assert_eq!(child_seed(42, 0), sm.next_u64());
        assert_eq!(child_seed(42, 1), sm.next_u64());
    }

    #[test]
    fn deterministic_streams() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = Rng::new(1);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = Rng::new(3);
        let n = 200_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let z = rng.next_gaussian();
            sum += z;
            sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = Rng::new(9);
        let mut v: Vec<usize> = (0..50).collect();
        rng.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn range_usize_covers_all_values() {
        let mut rng = Rng::new(11);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            seen[rng.range_usize(7)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}

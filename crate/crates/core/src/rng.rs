//! Seeded random source shared by every stochastic operation.
//!
//! The generator is ChaCha with 8 rounds as implemented by `rand_chacha` 0.9
//! (`ChaCha8Rng::seed_from_u64`). Its output stream is specified independently
//! of the host platform, so a seed fully determines every draw of a run.
//! Normal deviates come from `rand_distr` 0.5's ziggurat `StandardNormal`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Name of the generator, recorded in run manifests.
pub const GENERATOR_NAME: &str = "rand_chacha-0.9/ChaCha8Rng::seed_from_u64";

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        self.inner.random_range(0..n)
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }

    /// Chooses `count` distinct indices out of `0..n` uniformly at random.
    pub fn choose_distinct(&mut self, n: usize, count: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.inner, n, count.min(n)).into_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(1234);
        let mut b = RandomSource::new(1234);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = RandomSource::new(1);
        let mut b = RandomSource::new(2);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 2);
    }

    #[test]
    fn known_prefix_is_stable() {
        // Frozen from the generator itself; guards against silent changes of
        // the algorithm behind the documented name.
        let mut r = RandomSource::new(42);
        let first: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        assert_eq!(first, [12578764544318200737, 17529487244874322312, 7886285670807131020]);
    }

    #[test]
    fn distinct_choice() {
        let mut r = RandomSource::new(5);
        let mut picks = r.choose_distinct(10, 4);
        picks.sort_unstable();
        picks.dedup();
        assert_eq!(picks.len(), 4);
        assert!(picks.iter().all(|&i| i < 10));
        assert_eq!(r.choose_distinct(3, 10).len(), 3);
    }
}

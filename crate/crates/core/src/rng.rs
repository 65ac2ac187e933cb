//! Seed schedules. Every randomized routine draws its per-task seeds
//! sequentially from one master seed, so results do not depend on how
//! the tasks are spread over threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};

pub type Rng64 = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5EED;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` task seeds drawn in order from `master`.
pub fn schedule(master: u64, n: usize) -> Vec<u64> {
    let mut r = rng(master);
    (0..n).map(|_| r.next_u64()).collect()
}

pub fn cauchy(r: &mut Rng64) -> f64 {
    Cauchy::new(0.0, 1.0).expect("unit scale").sample(r)
}

pub fn normal(r: &mut Rng64) -> f64 {
    StandardNormal.sample(r)
}

/// `exp(U[-h, h])`.
pub fn log_uniform(r: &mut Rng64, h: f64) -> f64 {
    r.random_range(-h..=h).exp()
}

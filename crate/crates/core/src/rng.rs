//! Deterministic random streams.
//!
//! A run carries one master seed. Every consumer (LHS, GP restarts, network
//! init, minibatching, reverse chains, GA) derives its own stream from the
//! master seed plus a fixed path of tags, so adding draws in one component
//! never perturbs another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::Scalar;

pub type StreamRng = ChaCha8Rng;

/// Stream tags used by the optimizer.
pub mod tag {
    pub const LHS: u64 = 1;
    pub const GP: u64 = 2;
    pub const NET_INIT: u64 = 3;
    pub const TRAIN: u64 = 4;
    pub const GENERATE: u64 = 5;
    pub const GENETIC: u64 = 6;
    pub const UNIFORM: u64 = 7;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `path` into `master`, producing an independent 64-bit seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

pub(crate) fn normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

pub(crate) fn uniform01<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.random::<f64>())
}

//! Permutation-challenge games for non-adaptive cryptanalysis with
//! preprocessing.
//!
//! - [`infotheory`]: entropy and KL divergence over explicit distributions.
//! - [`permshearer`]: distributions over bijections and exhaustive checks of
//!   Shearer-type inequalities at small sizes.
//! - [`pcmodel`]: the games, oracles, adversary contract and bound formulas.
//! - [`attacks`]: reference adversaries.

pub mod attacks;
pub mod infotheory;
pub mod pcmodel;
pub mod permshearer;

pub(crate) mod rng {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub type Rng = ChaCha8Rng;

    pub fn seeded(seed: u64) -> Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }
}

pub use rng::{seeded, Rng};

/// The splitmix64 finalizer: a bijective avalanche on 64-bit words.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

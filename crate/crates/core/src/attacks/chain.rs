//! Discrete log with precomputed random-walk chains (the S·T² ≈ N
//! tradeoff). The online phase is adaptive: each query depends on the
//! previous answer.

use std::collections::HashMap;

use rand::Rng as _;

use super::point_width;
use crate::pcmodel::{
    Adaptivity, Adversary, Advice, Answer, GameError, OuterQuery, Oracle, Permutation, Result,
};
use crate::{splitmix64, Rng};

const STEP_KINDS: usize = 16;

/// Walk: x ↦ x + c[h(σ(x))] over 16 fixed offsets. A point is distinguished
/// when a second hash of σ(x) is 0 mod L, with L = max(1, T/2).
///
/// Preprocessing walks `chains` chains from random starts until they reach a
/// distinguished point (giving up after 8L steps) and stores each endpoint as
/// (σ(x), x). Online, the walk starts at d + o for a random offset o, so
/// σ(d + o) is the outer query (1, o). On reaching a stored endpoint
/// σ(x) at offset o, d = x − o. Unknown endpoints trigger a restart. After T
/// queries the adversary guesses.
#[derive(Debug, Clone)]
pub struct ChainDlog {
    n: u64,
    chains: usize,
    walk: usize,
    steps: [u64; STEP_KINDS],
    key: u64,
}

impl ChainDlog {
    pub fn new(n: u64, chains: usize, walk: usize, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(GameError::Invalid("chain walk needs N ≥ 3".into()));
        }
        let key = splitmix64(seed ^ 0x636861696e);
        let mut steps = [0; STEP_KINDS];
        for (i, s) in steps.iter_mut().enumerate() {
            *s = 1 + splitmix64(key.wrapping_add(i as u64)) % (n - 1);
        }
        Ok(Self { n, chains, walk, steps, key })
    }

    fn span(&self) -> u64 {
        (self.walk as u64 / 2).max(1)
    }

    fn step(&self, y: u64) -> u64 {
        self.steps[(splitmix64(y ^ self.key) % STEP_KINDS as u64) as usize]
    }

    fn distinguished(&self, y: u64) -> bool {
        splitmix64(y.wrapping_mul(0x9e37_79b9) ^ !self.key).is_multiple_of(self.span())
    }
}

impl Adversary for ChainDlog {
    fn name(&self) -> &str {
        "chain"
    }

    fn adaptivity(&self) -> Adaptivity {
        Adaptivity::Adaptive
    }

    fn s_bits(&self) -> usize {
        self.chains * 2 * point_width(self.n) as usize
    }

    fn preprocess(&self, sigma: &Permutation, rng: &mut Rng) -> Advice {
        let w = point_width(self.n);
        let max_len = 8 * self.span();
        let mut ends: HashMap<u64, u64> = HashMap::new();
        for _ in 0..self.chains {
            let mut x = rng.gen_range(0..self.n);
            for _ in 0..=max_len {
                let y = sigma.apply(x);
                if self.distinguished(y) {
                    ends.insert(y, x);
                    break;
                }
                x = (x + self.step(y)) % self.n;
            }
        }
        let mut ends: Vec<_> = ends.into_iter().collect();
        ends.sort_unstable();
        let mut advice = Advice::new();
        for (y, x) in ends {
            advice.push(y, w);
            advice.push(x, w);
        }
        advice
    }

    fn online(&self, advice: &Advice, oracle: &mut Oracle<'_>, rng: &mut Rng) -> Result<Answer> {
        let n = self.n;
        let w = point_width(n);
        let mut reader = advice.reader();
        let table: HashMap<u64, u64> = (0..advice.len() / (2 * w as usize))
            .map(|_| (reader.read(w), reader.read(w)))
            .collect();

        let mut offset = 0;
        while oracle.queries_made() < self.walk {
            let y = oracle.outer(&OuterQuery::Linear { a: 1, b: offset })?;
            if self.distinguished(y) {
                if let Some(&x) = table.get(&y) {
                    return Ok(Answer::Dlog((x + n - offset) % n));
                }
                offset = rng.gen_range(0..n);
            } else {
                offset = (offset + self.step(y)) % n;
            }
        }
        Ok(Answer::Dlog(rng.gen_range(0..n)))
    }
}

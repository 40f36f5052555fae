//! A non-adaptive sqDDH distinguisher with S bits of advice.

use rand::Rng as _;

use crate::pcmodel::{
    Adaptivity, Adversary, Advice, Answer, GameError, OuterQuery, Oracle, Permutation, QueryPlan,
    Result,
};
use crate::{splitmix64, Rng};

const TAG_P: u64 = 0x5051;
const TAG_Q: u64 = 0x5152;
const TAG_G: u64 = 0x4753;
const TAG_F: u64 = 0x4654;

/// A pair (σ(x), σ(x²)) is special when the keyed predicate P, of bias 1/T,
/// holds on it. Preprocessing sorts the special pairs into S buckets by a
/// keyed hash g and stores, per bucket, the majority value of a balanced
/// keyed predicate Q (ties and empty buckets store 0).
///
/// Online, the T queries (f_i, 0, 0) and (0, f_i², 0) for i < T/2, with
/// f_0 = 1, return (σ(f_i·d1), σ(f_i²·d2)); on a square instance these are
/// genuine pairs (σ(x), σ(x²)) for x = f_i·d1. The first special pair is
/// compared with the majority of its bucket: agreement answers "square".
/// Without a special pair the answer is a fair coin.
#[derive(Debug, Clone)]
pub struct SqddhDistinguisher {
    n: u64,
    buckets: usize,
    t: usize,
    key: u64,
}

impl SqddhDistinguisher {
    pub fn new(n: u64, buckets: usize, t: usize, seed: u64) -> Result<Self> {
        if buckets == 0 {
            return Err(GameError::Invalid("at least one bucket is needed".into()));
        }
        if t < 2 || !t.is_multiple_of(2) {
            return Err(GameError::Invalid(format!("query budget {t} must be even and at least 2")));
        }
        Ok(Self {
            n,
            buckets,
            t,
            key: splitmix64(seed ^ 0x7371_6464_6868),
        })
    }

    fn hash(&self, tag: u64, y1: u64, y2: u64) -> u64 {
        splitmix64(self.key.wrapping_add(tag) ^ splitmix64((y1 << 32) | y2))
    }

    pub fn special(&self, y1: u64, y2: u64) -> bool {
        self.hash(TAG_P, y1, y2) < u64::MAX / self.t as u64
    }

    fn q(&self, y1: u64, y2: u64) -> bool {
        self.hash(TAG_Q, y1, y2) & 1 == 1
    }

    fn bucket(&self, y1: u64, y2: u64) -> usize {
        (self.hash(TAG_G, y1, y2) % self.buckets as u64) as usize
    }

    fn multiplier(&self, i: usize) -> u64 {
        if i == 0 {
            1
        } else {
            1 + splitmix64(self.key ^ TAG_F ^ i as u64) % (self.n - 1)
        }
    }
}

impl Adversary for SqddhDistinguisher {
    fn name(&self) -> &str {
        "sqddh"
    }

    fn adaptivity(&self) -> Adaptivity {
        Adaptivity::NonAdaptive
    }

    fn s_bits(&self) -> usize {
        self.buckets
    }

    fn preprocess(&self, sigma: &Permutation, _: &mut Rng) -> Advice {
        let n = self.n;
        let mut votes = vec![0i64; self.buckets];
        for x in 0..n {
            let (y1, y2) = (sigma.apply(x), sigma.apply(x * x % n));
            if self.special(y1, y2) {
                votes[self.bucket(y1, y2)] += if self.q(y1, y2) { 1 } else { -1 };
            }
        }
        let mut advice = Advice::new();
        for v in votes {
            advice.push_bit(v > 0);
        }
        advice
    }

    fn online(&self, advice: &Advice, oracle: &mut Oracle<'_>, rng: &mut Rng) -> Result<Answer> {
        let n = self.n;
        let mut outer = Vec::with_capacity(self.t);
        for i in 0..self.t / 2 {
            let f = self.multiplier(i);
            outer.push(OuterQuery::Sqddh { a1: f, a2: 0, b: 0 });
            outer.push(OuterQuery::Sqddh { a1: 0, a2: f * f % n, b: 0 });
        }
        let answers = oracle.commit(&QueryPlan { inner: vec![], outer })?;
        for pair in answers.outer.chunks_exact(2) {
            let (y1, y2) = (pair[0], pair[1]);
            if self.special(y1, y2) {
                return Ok(Answer::Bit(self.q(y1, y2) == advice.bit(self.bucket(y1, y2))));
            }
        }
        Ok(Answer::Bit(rng.gen()))
    }
}

//! Daemen's difference-matching key recovery for Even-Mansour, with the
//! σ-queries moved into preprocessing.

use std::collections::HashMap;

use super::point_width;
use crate::pcmodel::{
    Adaptivity, Adversary, Advice, Answer, GameError, OuterQuery, Oracle, Permutation, QueryPlan,
    Result,
};
use crate::Rng;

/// Let W = {0, …, t1−1}, a subspace of the bit vectors since t1 is a power
/// of two, and α, β, γ nonzero distinct elements of W with γ ≠ α⊕β. The
/// advice is σ on W, from which the online phase rebuilds the table of
/// differences σ(x) ⊕ σ(x⊕α).
///
/// The online phase queries blocks m, m⊕α, m⊕β, m⊕γ for m = b·t1. When
/// m ⊕ k1 = x ∈ W, the difference EM(m) ⊕ EM(m⊕α) equals σ(x) ⊕ σ(x⊕α), so
/// it appears in the table; every x with that difference yields the candidate
/// k1 = m ⊕ x, k2 = EM(m) ⊕ σ(x), which the other three answers of the block
/// confirm or reject. Since {0, α, β, γ} is not a coset, a wrong candidate
/// survives only by a double coincidence. Block b covers the keys k1 in b·t1 ⊕ W, so the success
/// probability is min(t2/4, N/t1)·t1/N.
#[derive(Debug, Clone)]
pub struct Daemen {
    n: u64,
    t1: u64,
    blocks: u64,
    alpha: u64,
    beta: u64,
    gamma: u64,
    single_key: bool,
}

impl Daemen {
    pub fn new(n: u64, t1: u64, t2: u64, alpha: u64, single_key: bool) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(GameError::NotPowerOfTwo(n));
        }
        if !t1.is_power_of_two() || t1 < 8 || t1 > n {
            return Err(GameError::Invalid(format!("table size {t1} must be a power of two in 8..={n}")));
        }
        if alpha == 0 || alpha >= t1 {
            return Err(GameError::Invalid(format!("α = {alpha} must lie in 1..{t1}")));
        }
        let beta = (1..t1).find(|&v| v != alpha).expect("t1 ≥ 8");
        let gamma = (1..t1).find(|&v| ![alpha, beta, alpha ^ beta].contains(&v)).expect("t1 ≥ 8");
        Ok(Self {
            n,
            t1,
            blocks: (t2 / 4).min(n / t1),
            alpha,
            beta,
            gamma,
            single_key,
        })
    }

    pub fn t2(&self) -> u64 {
        4 * self.blocks
    }

    /// Exact success probability over uniform keys, ignoring the negligible
    /// chance that a wrong candidate survives validation.
    pub fn predicted_success(&self) -> f64 {
        (self.blocks * self.t1) as f64 / self.n as f64
    }

    /// The four messages of block b.
    pub fn block(&self, b: u64) -> [u64; 4] {
        let m = b * self.t1;
        [m, m ^ self.alpha, m ^ self.beta, m ^ self.gamma]
    }
}

impl Adversary for Daemen {
    fn name(&self) -> &str {
        "daemen"
    }

    fn adaptivity(&self) -> Adaptivity {
        Adaptivity::NonAdaptive
    }

    fn s_bits(&self) -> usize {
        (self.t1 * point_width(self.n) as u64) as usize
    }

    fn preprocess(&self, sigma: &Permutation, _: &mut Rng) -> Advice {
        let w = point_width(self.n);
        let mut advice = Advice::new();
        for x in 0..self.t1 {
            advice.push(sigma.apply(x), w);
        }
        advice
    }

    fn online(&self, advice: &Advice, oracle: &mut Oracle<'_>, _: &mut Rng) -> Result<Answer> {
        let plan = QueryPlan {
            inner: vec![],
            outer: (0..self.blocks)
                .flat_map(|b| self.block(b))
                .map(OuterQuery::Message)
                .collect(),
        };
        let answers = oracle.commit(&plan)?;

        let w = point_width(self.n);
        let mut reader = advice.reader();
        let sig: Vec<u64> = (0..self.t1).map(|_| reader.read(w)).collect();
        let mut by_diff: HashMap<u64, Vec<u64>> = HashMap::new();
        for x in 0..self.t1 {
            by_diff.entry(sig[x as usize] ^ sig[(x ^ self.alpha) as usize]).or_default().push(x);
        }
        let (a, b, c) = (self.alpha, self.beta, self.gamma);
        for (blk, e) in answers.outer.chunks_exact(4).enumerate() {
            let m = blk as u64 * self.t1;
            let Some(xs) = by_diff.get(&(e[0] ^ e[1])) else {
                continue;
            };
            for &x in xs {
                let s = |y: u64| sig[y as usize];
                let (k1, k2) = (m ^ x, e[0] ^ s(x));
                let consistent = e[1] == s(x ^ a) ^ k2 && e[2] == s(x ^ b) ^ k2 && e[3] == s(x ^ c) ^ k2;
                if !consistent {
                    continue;
                }
                if self.single_key {
                    if k1 == k2 {
                        return Ok(Answer::Key(k1));
                    }
                } else {
                    return Ok(Answer::Keys(k1, k2));
                }
            }
        }
        Ok(if self.single_key { Answer::Key(0) } else { Answer::Keys(0, 0) })
    }
}

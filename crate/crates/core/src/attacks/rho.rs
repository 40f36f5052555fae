//! Pollard's rho for discrete logarithms. Adaptive, no preprocessing; a
//! baseline for the non-adaptive attacks.

use rand::Rng as _;

use super::numtheory::{inv_mod, mul_mod};
use crate::pcmodel::{
    Adaptivity, Adversary, Advice, Answer, InnerQuery, OuterQuery, Oracle, Permutation, Result,
};
use crate::Rng;

/// Walks x ↦ 2x, x + d or x + 1 according to the encoding of x mod 3,
/// tracking x = α·d + β, and detects a cycle with Floyd's method. A collision
/// with α ≢ α' gives d = (β' − β)/(α − α'); otherwise the walk restarts from
/// a fresh random point. Stops and guesses once `budget` queries are spent.
#[derive(Debug, Clone)]
pub struct PollardRho {
    n: u64,
    budget: usize,
}

impl PollardRho {
    pub fn new(n: u64, budget: usize) -> Self {
        Self { n, budget }
    }
}

struct Walk<'o, 'a> {
    n: u64,
    oracle: &'o mut Oracle<'a>,
    budget: usize,
}

impl Walk<'_, '_> {
    fn encode(&mut self, (a, b): (u64, u64)) -> Result<Option<u64>> {
        if self.oracle.queries_made() >= self.budget {
            return Ok(None);
        }
        let y = if a == 0 {
            self.oracle.inner(InnerQuery::Forward(b))?
        } else {
            self.oracle.outer(&OuterQuery::Linear { a, b })?
        };
        Ok(Some(y))
    }

    fn step(&self, (a, b): (u64, u64), y: u64) -> (u64, u64) {
        let n = self.n;
        match y % 3 {
            0 => (2 * a % n, 2 * b % n),
            1 => ((a + 1) % n, b),
            _ => (a, (b + 1) % n),
        }
    }
}

impl Adversary for PollardRho {
    fn name(&self) -> &str {
        "rho"
    }

    fn adaptivity(&self) -> Adaptivity {
        Adaptivity::Adaptive
    }

    fn s_bits(&self) -> usize {
        0
    }

    fn preprocess(&self, _: &Permutation, _: &mut Rng) -> Advice {
        Advice::new()
    }

    fn online(&self, _: &Advice, oracle: &mut Oracle<'_>, rng: &mut Rng) -> Result<Answer> {
        let n = self.n;
        let mut walk = Walk { n, oracle, budget: self.budget };
        'restart: loop {
            // states[i] is the i-th point of the walk, codes[i] its encoding.
            let mut states = vec![(rng.gen_range(1..n), rng.gen_range(0..n))];
            let mut codes = Vec::new();
            let Some(y0) = walk.encode(states[0])? else { break };
            codes.push(y0);
            let mut i = 0;
            loop {
                i += 1;
                while states.len() <= 2 * i {
                    let k = states.len() - 1;
                    let next = walk.step(states[k], codes[k]);
                    let Some(y) = walk.encode(next)? else { break 'restart };
                    states.push(next);
                    codes.push(y);
                }
                if codes[i] == codes[2 * i] {
                    let ((a1, b1), (a2, b2)) = (states[i], states[2 * i]);
                    let Some(inv) = inv_mod((a1 + n - a2) % n, n) else {
                        continue 'restart;
                    };
                    return Ok(Answer::Dlog(mul_mod((b2 + n - b1) % n, inv, n)));
                }
            }
        }
        Ok(Answer::Dlog(rng.gen_range(0..n)))
    }
}

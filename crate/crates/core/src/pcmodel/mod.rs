//! Permutation-challenge games.
//!
//! A game fixes a secret space D, an outer query space M, a translation
//! `tr: D × M → [N]` and a post-processing map `post: D × [N] → [N]`. An
//! outer query `m` is answered with `post(d, σ(tr(d, m)))`; inner queries read
//! σ (or σ⁻¹ where allowed) directly.
//!
//! Points of `[N]` are stored 0-based. For the group games a point is the
//! residue itself, so the element written N is stored as 0. For Even-Mansour a
//! point is the label minus one, which is exactly the value whose bits get
//! XORed. [`PCGame::to_label`] and [`PCGame::from_label`] convert.

mod bounds;
mod mid;
mod oracle;

pub use bounds::{closed_form_uniformity, default_max_s, evaluate_bound, Theorem};
pub use mid::{
    mid_simulation_oracle, play_mid_game, sample_constrained, trivial_post_reduction,
    MidConstraints, MidSimulation,
};
pub use oracle::{
    play_game, play_with_advice, Adaptivity, Adversary, Advice, AdviceReader, GameTranscript,
    Oracle, Permutation, PlanAnswers, QueryPlan,
};

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rng;

/// Largest supported N; permutations are stored as `u32` tables.
pub const MAX_N: u64 = 1 << 26;

/// Upper limit on |M|·|D| for exhaustive uniformity counts.
pub const UNIFORMITY_WORK_CAP: u128 = 500_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("N = {0} must be prime for a group game")]
    NotPrime(u64),
    #[error("N = {0} must be a power of two for an Even-Mansour game")]
    NotPowerOfTwo(u64),
    #[error("N = {0} is out of the supported range")]
    SizeOutOfRange(u64),
    #[error("query {0} does not belong to this game's query space")]
    BadQuery(String),
    #[error("secret does not belong to this game's secret space")]
    BadSecret,
    #[error("invalid constraints: {0}")]
    BadConstraints(&'static str),
    #[error("exhaustive enumeration of {0} (query, secret) pairs is too large")]
    TooLarge(u128),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("contract violation: {0}")]
    Contract(#[from] ContractViolation),
}

impl GameError {
    pub fn is_contract_violation(&self) -> bool {
        matches!(self, GameError::Contract(_))
    }
}

/// Breaches of the adversary contract. These abort a run.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractViolation {
    #[error("advice has {len} bits but the adversary declared at most {bound}")]
    AdviceTooLong { len: usize, bound: usize },
    #[error("a non-adaptive adversary committed a second query plan")]
    SecondPlan,
    #[error("a non-adaptive adversary issued a step-wise query")]
    StepQuery,
    #[error("an adaptive adversary tried to commit a query plan")]
    PlanFromAdaptive,
    #[error("inverse inner queries are not allowed in this game")]
    InverseNotAllowed,
    #[error("inner query {0} is out of range")]
    InnerOutOfRange(u64),
    #[error("inner queries are not allowed in this game")]
    InnerNotAllowed,
    #[error("query budget of {0} exceeded")]
    BudgetExceeded(usize),
}

pub type Result<T> = std::result::Result<T, GameError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Dlog,
    Ddh,
    Sqddh,
    #[serde(rename = "em")]
    EmKr,
    #[serde(rename = "em1k")]
    EmKrSingle,
}

impl GameKind {
    pub const ALL: [GameKind; 5] = [
        GameKind::Dlog,
        GameKind::Ddh,
        GameKind::Sqddh,
        GameKind::EmKr,
        GameKind::EmKrSingle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Dlog => "dlog",
            GameKind::Ddh => "ddh",
            GameKind::Sqddh => "sqddh",
            GameKind::EmKr => "em",
            GameKind::EmKrSingle => "em1k",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_group(self) -> bool {
        matches!(self, GameKind::Dlog | GameKind::Ddh | GameKind::Sqddh)
    }
}

impl std::fmt::Display for GameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Secret {
    Dlog(u64),
    Ddh { d1: u64, d2: u64, d3: u64, k: bool },
    Sqddh { d1: u64, d2: u64, k: bool },
    Em { k1: u64, k2: u64 },
    EmSingle(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OuterQuery {
    /// `a·d + b`, with `a ≠ 0`.
    Linear { a: u64, b: u64 },
    /// `a1·d1 + a2·d2 + a3·(d3 or d1·d2) + b`, not all of a1, a2, a3 zero.
    Ddh { a1: u64, a2: u64, a3: u64, b: u64 },
    /// `a1·d1 + a2·(d2 or d1²) + b`, not both of a1, a2 zero.
    Sqddh { a1: u64, a2: u64, b: u64 },
    /// An encryption query.
    Message(u64),
}

impl std::fmt::Display for OuterQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OuterQuery::Linear { a, b } => write!(f, "({a},{b})"),
            OuterQuery::Ddh { a1, a2, a3, b } => write!(f, "({a1},{a2},{a3},{b})"),
            OuterQuery::Sqddh { a1, a2, b } => write!(f, "({a1},{a2},{b})"),
            OuterQuery::Message(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InnerQuery {
    Forward(u64),
    Inverse(u64),
}

/// What an adversary outputs, and what the success predicate compares it to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Dlog(u64),
    Bit(bool),
    Keys(u64, u64),
    Key(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PCGame {
    kind: GameKind,
    n: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl PCGame {
    pub fn new(kind: GameKind, n: u64) -> Result<Self> {
        if n < 2 || n > MAX_N {
            return Err(GameError::SizeOutOfRange(n));
        }
        if kind.is_group() && !is_prime(n) {
            return Err(GameError::NotPrime(n));
        }
        if !kind.is_group() && !n.is_power_of_two() {
            return Err(GameError::NotPowerOfTwo(n));
        }
        Ok(Self { kind, n })
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn allow_inverse_inner(&self) -> bool {
        !self.kind.is_group()
    }

    pub fn to_label(&self, point: u64) -> u64 {
        if self.kind.is_group() {
            if point == 0 {
                self.n
            } else {
                point
            }
        } else {
            point + 1
        }
    }

    pub fn from_label(&self, label: u64) -> u64 {
        if self.kind.is_group() {
            label % self.n
        } else {
            label - 1
        }
    }

    fn check_point(&self, x: u64) -> Result<()> {
        if x >= self.n {
            return Err(GameError::BadSecret);
        }
        Ok(())
    }

    pub fn validate_secret(&self, s: &Secret) -> Result<()> {
        match (self.kind, *s) {
            (GameKind::Dlog, Secret::Dlog(d)) => self.check_point(d),
            (GameKind::Ddh, Secret::Ddh { d1, d2, d3, .. }) => {
                [d1, d2, d3].iter().try_for_each(|&x| self.check_point(x))
            }
            (GameKind::Sqddh, Secret::Sqddh { d1, d2, .. }) => {
                [d1, d2].iter().try_for_each(|&x| self.check_point(x))
            }
            (GameKind::EmKr, Secret::Em { k1, k2 }) => {
                self.check_point(k1)?;
                self.check_point(k2)
            }
            (GameKind::EmKrSingle, Secret::EmSingle(k)) => self.check_point(k),
            _ => Err(GameError::BadSecret),
        }
    }

    pub fn validate_query(&self, q: &OuterQuery) -> Result<()> {
        let n = self.n;
        let ok = match (self.kind, *q) {
            (GameKind::Dlog, OuterQuery::Linear { a, b }) => a != 0 && a < n && b < n,
            (GameKind::Ddh, OuterQuery::Ddh { a1, a2, a3, b }) => {
                (a1 | a2 | a3) != 0 && a1 < n && a2 < n && a3 < n && b < n
            }
            (GameKind::Sqddh, OuterQuery::Sqddh { a1, a2, b }) => {
                (a1 | a2) != 0 && a1 < n && a2 < n && b < n
            }
            (GameKind::EmKr | GameKind::EmKrSingle, OuterQuery::Message(m)) => m < n,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GameError::BadQuery(q.to_string()))
        }
    }

    /// `tr(d, m)`, assuming both arguments are valid.
    pub fn translate_unchecked(&self, s: &Secret, q: &OuterQuery) -> u64 {
        let n = self.n;
        let mul = |a: u64, b: u64| a * b % n;
        match (*s, *q) {
            (Secret::Dlog(d), OuterQuery::Linear { a, b }) => (mul(a, d) + b) % n,
            (Secret::Ddh { d1, d2, d3, k }, OuterQuery::Ddh { a1, a2, a3, b }) => {
                let third = if k { mul(d1, d2) } else { d3 };
                (mul(a1, d1) + mul(a2, d2) + mul(a3, third) + b) % n
            }
            (Secret::Sqddh { d1, d2, k }, OuterQuery::Sqddh { a1, a2, b }) => {
                let second = if k { mul(d1, d1) } else { d2 };
                (mul(a1, d1) + mul(a2, second) + b) % n
            }
            (Secret::Em { k1, .. } | Secret::EmSingle(k1), OuterQuery::Message(m)) => m ^ k1,
            _ => unreachable!("secret and query kinds are validated together"),
        }
    }

    pub fn translate(&self, s: &Secret, q: &OuterQuery) -> Result<u64> {
        self.validate_secret(s)?;
        self.validate_query(q)?;
        Ok(self.translate_unchecked(s, q))
    }

    pub fn post_process(&self, s: &Secret, j: u64) -> u64 {
        match *s {
            Secret::Em { k2, .. } => j ^ k2,
            Secret::EmSingle(k) => j ^ k,
            _ => j,
        }
    }

    pub fn has_trivial_post(&self) -> bool {
        self.kind.is_group()
    }

    pub fn success_target(&self, s: &Secret) -> Answer {
        match *s {
            Secret::Dlog(d) => Answer::Dlog(d),
            Secret::Ddh { k, .. } | Secret::Sqddh { k, .. } => Answer::Bit(k),
            Secret::Em { k1, k2 } => Answer::Keys(k1, k2),
            Secret::EmSingle(k) => Answer::Key(k),
        }
    }

    pub fn secret_space_size(&self) -> u128 {
        let n = self.n as u128;
        match self.kind {
            GameKind::Dlog | GameKind::EmKrSingle => n,
            GameKind::Ddh => 2 * n * n * n,
            GameKind::Sqddh => 2 * n * n,
            GameKind::EmKr => n * n,
        }
    }

    pub fn query_space_size(&self) -> u128 {
        let n = self.n as u128;
        match self.kind {
            GameKind::Dlog => (n - 1) * n,
            GameKind::Ddh => (n * n * n - 1) * n,
            GameKind::Sqddh => (n * n - 1) * n,
            GameKind::EmKr | GameKind::EmKrSingle => n,
        }
    }

    pub fn sample_secret(&self, rng: &mut Rng) -> Secret {
        let n = self.n;
        match self.kind {
            GameKind::Dlog => Secret::Dlog(rng.gen_range(0..n)),
            GameKind::Ddh => Secret::Ddh {
                d1: rng.gen_range(0..n),
                d2: rng.gen_range(0..n),
                d3: rng.gen_range(0..n),
                k: rng.gen(),
            },
            GameKind::Sqddh => Secret::Sqddh {
                d1: rng.gen_range(0..n),
                d2: rng.gen_range(0..n),
                k: rng.gen(),
            },
            GameKind::EmKr => Secret::Em {
                k1: rng.gen_range(0..n),
                k2: rng.gen_range(0..n),
            },
            GameKind::EmKrSingle => Secret::EmSingle(rng.gen_range(0..n)),
        }
    }

    pub fn for_each_secret(&self, mut f: impl FnMut(Secret)) {
        let n = self.n;
        match self.kind {
            GameKind::Dlog => (0..n).for_each(|d| f(Secret::Dlog(d))),
            GameKind::Ddh => {
                for k in [false, true] {
                    for d1 in 0..n {
                        for d2 in 0..n {
                            for d3 in 0..n {
                                f(Secret::Ddh { d1, d2, d3, k });
                            }
                        }
                    }
                }
            }
            GameKind::Sqddh => {
                for k in [false, true] {
                    for d1 in 0..n {
                        for d2 in 0..n {
                            f(Secret::Sqddh { d1, d2, k });
                        }
                    }
                }
            }
            GameKind::EmKr => {
                for k1 in 0..n {
                    for k2 in 0..n {
                        f(Secret::Em { k1, k2 });
                    }
                }
            }
            GameKind::EmKrSingle => (0..n).for_each(|k| f(Secret::EmSingle(k))),
        }
    }

    pub fn for_each_query(&self, mut f: impl FnMut(OuterQuery)) {
        let n = self.n;
        match self.kind {
            GameKind::Dlog => {
                for a in 1..n {
                    for b in 0..n {
                        f(OuterQuery::Linear { a, b });
                    }
                }
            }
            GameKind::Ddh => {
                for a1 in 0..n {
                    for a2 in 0..n {
                        for a3 in 0..n {
                            if (a1 | a2 | a3) == 0 {
                                continue;
                            }
                            for b in 0..n {
                                f(OuterQuery::Ddh { a1, a2, a3, b });
                            }
                        }
                    }
                }
            }
            GameKind::Sqddh => {
                for a1 in 0..n {
                    for a2 in 0..n {
                        if (a1 | a2) == 0 {
                            continue;
                        }
                        for b in 0..n {
                            f(OuterQuery::Sqddh { a1, a2, b });
                        }
                    }
                }
            }
            GameKind::EmKr | GameKind::EmKrSingle => (0..n).for_each(|m| f(OuterQuery::Message(m))),
        }
    }
}

/// Result of an exhaustive uniformity count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniformity {
    pub u: f64,
    pub worst_query: OuterQuery,
    pub worst_target: u64,
    pub max_fiber: u64,
}

/// u = |D| / max over (m, j) of |{d : tr(d, m) = j}|, by counting every fiber.
pub fn measure_uniformity(game: &PCGame) -> Result<Uniformity> {
    let work = game.secret_space_size() * game.query_space_size();
    if work > UNIFORMITY_WORK_CAP {
        return Err(GameError::TooLarge(work));
    }
    let mut secrets = Vec::new();
    game.for_each_secret(|s| secrets.push(s));
    let mut counts = vec![0u64; game.n as usize];
    let mut best: Option<(u64, OuterQuery, u64)> = None;
    game.for_each_query(|q| {
        counts.iter_mut().for_each(|c| *c = 0);
        for s in &secrets {
            counts[game.translate_unchecked(s, &q) as usize] += 1;
        }
        let (j, &c) = counts
            .iter()
            .enumerate()
            .max_by_key(|&(j, c)| (*c, std::cmp::Reverse(j)))
            .expect("n ≥ 2");
        if best.map_or(true, |(b, _, _)| c > b) {
            best = Some((c, q, j as u64));
        }
    });
    let (max_fiber, worst_query, worst_target) =
        best.ok_or_else(|| GameError::Invalid("empty query space".into()))?;
    Ok(Uniformity {
        u: secrets.len() as f64 / max_fiber as f64,
        worst_query,
        worst_target,
        max_fiber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_validation() {
        assert_eq!(PCGame::new(GameKind::Dlog, 6), Err(GameError::NotPrime(6)));
        assert_eq!(PCGame::new(GameKind::EmKr, 12), Err(GameError::NotPowerOfTwo(12)));
        assert!(PCGame::new(GameKind::Sqddh, 8191).is_ok());
        assert!(PCGame::new(GameKind::EmKrSingle, 1024).is_ok());
        assert!(!PCGame::new(GameKind::Ddh, 5).unwrap().allow_inverse_inner());
        assert!(PCGame::new(GameKind::EmKr, 8).unwrap().allow_inverse_inner());
    }

    #[test]
    fn dlog_translation_example() {
        let g = PCGame::new(GameKind::Dlog, 5).unwrap();
        let j = g.translate(&Secret::Dlog(3), &OuterQuery::Linear { a: 2, b: 4 }).unwrap();
        assert_eq!(j, 0);
        assert_eq!(g.to_label(j), 5);
        assert!(g.translate(&Secret::Dlog(3), &OuterQuery::Linear { a: 0, b: 4 }).is_err());
        assert!(g.translate(&Secret::Dlog(3), &OuterQuery::Message(1)).is_err());
    }

    #[test]
    fn em_translation_example() {
        let g = PCGame::new(GameKind::EmKr, 8).unwrap();
        let s = Secret::Em { k1: g.from_label(3), k2: g.from_label(5) };
        let j = g.translate(&s, &OuterQuery::Message(g.from_label(3))).unwrap();
        assert_eq!(j, 0);
        assert_eq!(g.to_label(j), 1);
        // label 7 is bits 110, label 5 is bits 100: 110 ⊕ 100 = 010, label 3.
        assert_eq!(g.to_label(g.post_process(&s, g.from_label(7))), 3);
    }

    #[test]
    fn ddh_translation_uses_product_when_k_set() {
        let g = PCGame::new(GameKind::Ddh, 5).unwrap();
        let q = OuterQuery::Ddh { a1: 1, a2: 1, a3: 1, b: 0 };
        let real = Secret::Ddh { d1: 2, d2: 3, d3: 4, k: true };
        let rand = Secret::Ddh { d1: 2, d2: 3, d3: 4, k: false };
        assert_eq!(g.translate(&real, &q).unwrap(), (2 + 3 + 6) % 5);
        assert_eq!(g.translate(&rand, &q).unwrap(), (2 + 3 + 4) % 5);
    }

    #[test]
    fn sqddh_translation_uses_square_when_k_set() {
        let g = PCGame::new(GameKind::Sqddh, 7).unwrap();
        let q = OuterQuery::Sqddh { a1: 0, a2: 3, b: 1 };
        assert_eq!(g.translate(&Secret::Sqddh { d1: 4, d2: 2, k: true }, &q).unwrap(), (3 * 16 + 1) % 7);
        assert_eq!(g.translate(&Secret::Sqddh { d1: 4, d2: 2, k: false }, &q).unwrap(), (3 * 2 + 1) % 7);
    }

    #[test]
    fn uniformity_small_cases() {
        let u = measure_uniformity(&PCGame::new(GameKind::Dlog, 5).unwrap()).unwrap();
        assert_eq!(u.u, 5.0);
        let u = measure_uniformity(&PCGame::new(GameKind::EmKr, 8).unwrap()).unwrap();
        assert_eq!(u.u, 8.0);
        let u = measure_uniformity(&PCGame::new(GameKind::Ddh, 5).unwrap()).unwrap();
        assert!(u.u >= 2.5);
        assert!(measure_uniformity(&PCGame::new(GameKind::Ddh, 1009).unwrap()).is_err());
    }

    #[test]
    fn space_sizes_match_enumeration() {
        for (kind, n) in [(GameKind::Dlog, 7), (GameKind::Ddh, 3), (GameKind::Sqddh, 5), (GameKind::EmKr, 4), (GameKind::EmKrSingle, 8)] {
            let g = PCGame::new(kind, n).unwrap();
            let mut qs = 0u128;
            g.for_each_query(|q| {
                g.validate_query(&q).unwrap();
                qs += 1;
            });
            let mut ds = 0u128;
            g.for_each_secret(|s| {
                g.validate_secret(&s).unwrap();
                ds += 1;
            });
            assert_eq!(qs, g.query_space_size());
            assert_eq!(ds, g.secret_space_size());
        }
    }

    #[test]
    fn label_round_trip() {
        let g = PCGame::new(GameKind::Dlog, 7).unwrap();
        for p in 0..7 {
            assert_eq!(g.from_label(g.to_label(p)), p);
        }
        let e = PCGame::new(GameKind::EmKr, 8).unwrap();
        for p in 0..8 {
            assert_eq!(e.from_label(e.to_label(p)), p);
        }
    }
}

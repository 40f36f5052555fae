use rand::seq::SliceRandom;

use super::{
    Answer, ContractViolation, GameError, InnerQuery, OuterQuery, PCGame, Result, Secret,
};
use crate::Rng;

/// A bijection of `0..n`, stored with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    fwd: Vec<u32>,
    inv: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: u64) -> Self {
        let fwd: Vec<u32> = (0..n as u32).collect();
        Self { inv: fwd.clone(), fwd }
    }

    /// Uniform permutation via a Fisher–Yates shuffle.
    pub fn random(n: u64, rng: &mut Rng) -> Self {
        let mut fwd: Vec<u32> = (0..n as u32).collect();
        fwd.shuffle(rng);
        Self::from_table(fwd).expect("a shuffle is a bijection")
    }

    pub fn from_table(fwd: Vec<u32>) -> Option<Self> {
        let mut inv = vec![u32::MAX; fwd.len()];
        for (i, &x) in fwd.iter().enumerate() {
            let slot = inv.get_mut(x as usize)?;
            if *slot != u32::MAX {
                return None;
            }
            *slot = i as u32;
        }
        Some(Self { fwd, inv })
    }

    pub fn n(&self) -> u64 {
        self.fwd.len() as u64
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        self.fwd[x as usize] as u64
    }

    #[inline]
    pub fn invert(&self, y: u64) -> u64 {
        self.inv[y as usize] as u64
    }

    pub fn table(&self) -> &[u32] {
        &self.fwd
    }
}

/// An advice string: an opaque sequence of bits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Advice {
    words: Vec<u64>,
    len: usize,
}

impl Advice {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, least significant first.
    pub fn push(&mut self, value: u64, width: u32) {
        for i in 0..width {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} beyond advice length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn reader(&self) -> AdviceReader<'_> {
        AdviceReader { advice: self, pos: 0 }
    }
}

pub struct AdviceReader<'a> {
    advice: &'a Advice,
    pos: usize,
}

impl AdviceReader<'_> {
    pub fn read(&mut self, width: u32) -> u64 {
        let mut v = 0;
        for i in 0..width {
            if self.advice.bit(self.pos) {
                v |= 1 << i;
            }
            self.pos += 1;
        }
        v
    }

    pub fn remaining(&self) -> usize {
        self.advice.len - self.pos
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Adaptivity {
    NonAdaptive,
    Adaptive,
}

/// Queries a non-adaptive adversary fixes before seeing any answer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryPlan {
    pub inner: Vec<InnerQuery>,
    pub outer: Vec<OuterQuery>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlanAnswers {
    pub inner: Vec<u64>,
    pub outer: Vec<u64>,
}

/// An (S, T) algorithm with preprocessing.
///
/// Non-adaptive adversaries must call [`Oracle::commit`] exactly once and may
/// not use the step-wise methods; adaptive adversaries do the reverse. The
/// oracle enforces both.
pub trait Adversary: Sync {
    fn name(&self) -> &str;
    fn adaptivity(&self) -> Adaptivity;
    /// Upper bound S on the advice length.
    fn s_bits(&self) -> usize;
    fn preprocess(&self, sigma: &Permutation, rng: &mut Rng) -> Advice;
    fn online(&self, advice: &Advice, oracle: &mut Oracle<'_>, rng: &mut Rng) -> Result<Answer>;
}

/// Query interface handed to the online phase.
pub struct Oracle<'a> {
    game: &'a PCGame,
    sigma: &'a Permutation,
    secret: &'a Secret,
    mode: Adaptivity,
    committed: bool,
    budget: Option<usize>,
    inner_answers: Vec<u64>,
    outer_answers: Vec<u64>,
}

impl<'a> Oracle<'a> {
    pub fn new(game: &'a PCGame, sigma: &'a Permutation, secret: &'a Secret, mode: Adaptivity) -> Self {
        Self {
            game,
            sigma,
            secret,
            mode,
            committed: false,
            budget: None,
            inner_answers: Vec::new(),
            outer_answers: Vec::new(),
        }
    }

    /// Caps the total number of queries; exceeding it is a contract violation.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn game(&self) -> &PCGame {
        self.game
    }

    pub fn queries_made(&self) -> usize {
        self.inner_answers.len() + self.outer_answers.len()
    }

    fn charge(&self, extra: usize) -> Result<()> {
        match self.budget {
            Some(b) if self.queries_made() + extra > b => Err(ContractViolation::BudgetExceeded(b).into()),
            _ => Ok(()),
        }
    }

    fn answer_inner(&self, q: InnerQuery) -> Result<u64> {
        let n = self.game.n();
        match q {
            InnerQuery::Forward(x) if x < n => Ok(self.sigma.apply(x)),
            InnerQuery::Inverse(y) if y < n => {
                if self.game.allow_inverse_inner() {
                    Ok(self.sigma.invert(y))
                } else {
                    Err(ContractViolation::InverseNotAllowed.into())
                }
            }
            InnerQuery::Forward(x) | InnerQuery::Inverse(x) => Err(ContractViolation::InnerOutOfRange(x).into()),
        }
    }

    fn answer_outer(&self, q: &OuterQuery) -> Result<u64> {
        self.game.validate_query(q)?;
        let j = self.sigma.apply(self.game.translate_unchecked(self.secret, q));
        Ok(self.game.post_process(self.secret, j))
    }

    /// Submits the whole query plan and returns every answer at once.
    pub fn commit(&mut self, plan: &QueryPlan) -> Result<PlanAnswers> {
        match (self.mode, self.committed) {
            (Adaptivity::Adaptive, _) => return Err(ContractViolation::PlanFromAdaptive.into()),
            (_, true) => return Err(ContractViolation::SecondPlan.into()),
            _ => {}
        }
        self.committed = true;
        self.charge(plan.inner.len() + plan.outer.len())?;
        let inner = plan.inner.iter().map(|&q| self.answer_inner(q)).collect::<Result<Vec<_>>>()?;
        let outer = plan.outer.iter().map(|q| self.answer_outer(q)).collect::<Result<Vec<_>>>()?;
        self.inner_answers.extend(&inner);
        self.outer_answers.extend(&outer);
        Ok(PlanAnswers { inner, outer })
    }

    pub fn inner(&mut self, q: InnerQuery) -> Result<u64> {
        if self.mode == Adaptivity::NonAdaptive {
            return Err(ContractViolation::StepQuery.into());
        }
        self.charge(1)?;
        let a = self.answer_inner(q)?;
        self.inner_answers.push(a);
        Ok(a)
    }

    pub fn outer(&mut self, q: &OuterQuery) -> Result<u64> {
        if self.mode == Adaptivity::NonAdaptive {
            return Err(ContractViolation::StepQuery.into());
        }
        self.charge(1)?;
        let a = self.answer_outer(q)?;
        self.outer_answers.push(a);
        Ok(a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameTranscript {
    pub sigma: Permutation,
    pub secret: Secret,
    pub advice: Advice,
    pub inner_answers: Vec<u64>,
    pub outer_answers: Vec<u64>,
    pub output: Answer,
    pub success: bool,
    pub t1: usize,
    pub t2: usize,
}

impl GameTranscript {
    pub fn t(&self) -> usize {
        self.t1 + self.t2
    }
}

/// Runs preprocessing on σ, then the online phase against `secret`.
pub fn play_game(
    game: &PCGame,
    adv: &dyn Adversary,
    sigma: &Permutation,
    secret: &Secret,
    rng: &mut Rng,
) -> Result<GameTranscript> {
    let advice = adv.preprocess(sigma, rng);
    play_with_advice(game, adv, sigma, advice, secret, rng)
}

/// Online phase only, with advice computed earlier for the same σ.
pub fn play_with_advice(
    game: &PCGame,
    adv: &dyn Adversary,
    sigma: &Permutation,
    advice: Advice,
    secret: &Secret,
    rng: &mut Rng,
) -> Result<GameTranscript> {
    if sigma.n() != game.n() {
        return Err(GameError::Invalid(format!(
            "permutation over {} points for a game with N = {}",
            sigma.n(),
            game.n()
        )));
    }
    game.validate_secret(secret)?;
    if advice.len() > adv.s_bits() {
        return Err(ContractViolation::AdviceTooLong {
            len: advice.len(),
            bound: adv.s_bits(),
        }
        .into());
    }
    let mut oracle = Oracle::new(game, sigma, secret, adv.adaptivity());
    let output = adv.online(&advice, &mut oracle, rng)?;
    let Oracle {
        inner_answers,
        outer_answers,
        ..
    } = oracle;
    Ok(GameTranscript {
        sigma: sigma.clone(),
        secret: *secret,
        advice,
        t1: inner_answers.len(),
        t2: outer_answers.len(),
        inner_answers,
        outer_answers,
        success: output == game.success_target(secret),
        output,
    })
}

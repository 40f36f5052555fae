//! Distributions over bijections and exhaustive checks of Shearer-type
//! inequalities.
//!
//! Coordinates and codomain positions are 0-based. Every comparison is
//! against Q, the uniform distribution over all n! bijections, whose
//! projection onto any k coordinates is uniform over the n!/(n−k)! injective
//! k-tuples. Enumeration is capped at n = [`MAX_N`].

pub mod lehmer;

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, StandardNormal};
use thiserror::Error;

use crate::infotheory::{
    self, compensated_sum, kl_bernoulli, kl_of, FiniteDistribution, InfoError,
    JointDistribution,
};
use crate::rng::{seeded, Rng};
use lehmer::{factorial, falling, for_each_permutation, rank, rank_tuple, unrank_tuple};

pub const MAX_N: usize = 8;
pub const SEARCH_MAX_N: usize = 6;
pub const HILL_CLIMB_STEPS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShearerError {
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("coordinate {index} is out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("coordinate {0} appears twice in one set")]
    RepeatedCoordinate(usize),
    #[error("some coordinate lies in {actual} sets, more than the declared k = {declared}")]
    MultiplicityExceeded { actual: usize, declared: usize },
    #[error("cover is over {cover} coordinates but the distribution has {dist}")]
    SizeMismatch { cover: usize, dist: usize },
    #[error("value table of function {index} has {len} entries, expected {expected}")]
    TableSize { index: usize, len: usize, expected: usize },
    #[error("function {index} takes value {value} outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("support is not the set of indicator vectors of length {0}")]
    NotIndicatorSupport(usize),
    #[error("technical lemma precondition violated: {0}")]
    LemmaPrecondition(&'static str),
    #[error("codomain labels must be distinct and number n")]
    BadCodomain,
    #[error(transparent)]
    Info(#[from] InfoError),
}

pub type Result<T> = std::result::Result<T, ShearerError>;

fn check_n(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(ShearerError::TooLarge { n, cap });
    }
    Ok(())
}

/// Probability mass over the bijections `[n] → codomain`, indexed by the
/// Lehmer rank of the permutation of codomain positions.
#[derive(Debug, Clone, PartialEq)]
pub struct BijectionDistribution {
    n: usize,
    codomain: Vec<usize>,
    mass: Vec<f64>,
}

impl BijectionDistribution {
    pub fn new(n: usize, mass: Vec<f64>) -> Result<Self> {
        Self::with_codomain((0..n).collect(), mass)
    }

    pub fn with_codomain(codomain: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        let n = codomain.len();
        check_n(n, MAX_N)?;
        let mut sorted = codomain.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != n {
            return Err(ShearerError::BadCodomain);
        }
        if mass.len() != factorial(n) {
            return Err(InfoError::LengthMismatch {
                support: factorial(n),
                mass: mass.len(),
            }
            .into());
        }
        infotheory::validate_masses(&mass)?;
        Ok(Self { n, codomain, mass })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_n(n, MAX_N)?;
        let size = factorial(n);
        Self::new(n, vec![1.0 / size as f64; size])
    }

    pub fn point_mass(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        check_n(n, MAX_N)?;
        let mut mass = vec![0.0; factorial(n)];
        mass[rank(perm)] = 1.0;
        Self::new(n, mass)
    }

    /// Symmetric Dirichlet(1) sample over the n! masses.
    pub fn dirichlet(n: usize, rng: &mut Rng) -> Result<Self> {
        check_n(n, MAX_N)?;
        let weights: Vec<f64> = (0..factorial(n)).map(|_| Exp1.sample(rng)).collect();
        let total = compensated_sum(weights.iter().copied());
        Self::new(n, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codomain(&self) -> &[usize] {
        &self.codomain
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass_of(&self, perm: &[usize]) -> f64 {
        self.mass[rank(perm)]
    }

    /// KL(P‖Q) against the uniform distribution over bijections.
    pub fn kl_to_uniform(&self) -> f64 {
        kl_to_uniform(&self.mass)
    }

    /// The same masses as a plain distribution over codomain tuples.
    pub fn to_distribution(&self) -> FiniteDistribution<Vec<usize>> {
        let mut support = Vec::with_capacity(self.mass.len());
        for_each_permutation(self.n, |_, p| {
            support.push(p.iter().map(|&x| self.codomain[x]).collect());
        });
        FiniteDistribution::new(support, self.mass.clone()).expect("validated on construction")
    }

    fn marginal_masses(&self, u: &[usize]) -> Result<Vec<f64>> {
        let mut seen = 0u64;
        for &i in u {
            if i >= self.n {
                return Err(ShearerError::OutOfRange { index: i, n: self.n });
            }
            if seen & (1 << i) != 0 {
                return Err(ShearerError::RepeatedCoordinate(i));
            }
            seen |= 1 << i;
        }
        let mut out = vec![0.0; falling(self.n, u.len())];
        let mut tuple = vec![0; u.len()];
        for_each_permutation(self.n, |r, p| {
            for (slot, &i) in tuple.iter_mut().zip(u) {
                *slot = p[i];
            }
            out[rank_tuple(self.n, &tuple)] += self.mass[r];
        });
        Ok(out)
    }

    fn marginal_kl(&self, u: &[usize]) -> Result<f64> {
        Ok(kl_to_uniform(&self.marginal_masses(u)?))
    }
}

fn kl_to_uniform(mass: &[f64]) -> f64 {
    let q = vec![1.0 / mass.len() as f64; mass.len()];
    kl_of(mass, &q)
}

/// Distribution of `(x_i)_{i∈u}` under `p`, over all injective tuples of
/// codomain labels in lexicographic order of codomain positions.
pub fn marginal(p: &BijectionDistribution, u: &[usize]) -> Result<FiniteDistribution<Vec<usize>>> {
    let mass = p.marginal_masses(u)?;
    let support = (0..mass.len())
        .map(|r| {
            unrank_tuple(p.n, u.len(), r)
                .into_iter()
                .map(|x| p.codomain[x])
                .collect()
        })
        .collect();
    Ok(FiniteDistribution::new(support, mass)?)
}

/// Subsets U_1..U_m of `0..n` together with a multiplicity bound k.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverFamily {
    n: usize,
    sets: Vec<Vec<usize>>,
    k: usize,
}

impl CoverFamily {
    /// k is taken to be the actual maximum multiplicity.
    pub fn new(n: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let k = multiplicity(n, &sets)?;
        Ok(Self { n, sets, k })
    }

    pub fn with_declared_k(n: usize, sets: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let actual = multiplicity(n, &sets)?;
        if actual > k {
            return Err(ShearerError::MultiplicityExceeded { actual, declared: k });
        }
        Ok(Self { n, sets, k })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            sets: (0..n).map(|i| vec![i]).collect(),
            k: usize::from(n > 0),
        }
    }

    /// `m` sets, each containing every coordinate independently with
    /// probability 1/2.
    pub fn random(n: usize, m: usize, rng: &mut Rng) -> Self {
        let sets = (0..m)
            .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        Self::new(n, sets).expect("coordinates in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

fn multiplicity(n: usize, sets: &[Vec<usize>]) -> Result<usize> {
    let mut count = vec![0usize; n];
    for set in sets {
        let mut seen = vec![false; n];
        for &i in set {
            if i >= n {
                return Err(ShearerError::OutOfRange { index: i, n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(ShearerError::RepeatedCoordinate(i));
            }
            count[i] += 1;
        }
    }
    Ok(count.into_iter().max().unwrap_or(0))
}

/// A [0,1]-valued function reading only the coordinates in `deps`. The table
/// is indexed by the codomain positions of those coordinates read as base-n
/// digits, most significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadKFunction {
    pub deps: Vec<usize>,
    pub table: Vec<f64>,
}

impl ReadKFunction {
    fn eval(&self, n: usize, perm: &[usize]) -> f64 {
        let idx = self.deps.iter().fold(0, |acc, &i| acc * n + perm[i]);
        self.table[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadKFamily {
    cover: CoverFamily,
    functions: Vec<ReadKFunction>,
}

impl ReadKFamily {
    pub fn new(n: usize, functions: Vec<ReadKFunction>, k: usize) -> Result<Self> {
        check_n(n, MAX_N)?;
        let sets = functions.iter().map(|f| f.deps.clone()).collect();
        let cover = CoverFamily::with_declared_k(n, sets, k)?;
        for (index, f) in functions.iter().enumerate() {
            let expected = n.pow(f.deps.len() as u32);
            if f.table.len() != expected {
                return Err(ShearerError::TableSize {
                    index,
                    len: f.table.len(),
                    expected,
                });
            }
            if let Some(&value) = f.table.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(ShearerError::ValueOutOfRange { index, value });
            }
        }
        Ok(Self { cover, functions })
    }

    /// Builds tables by evaluating `f(j, positions)` on every assignment.
    pub fn from_fn(
        n: usize,
        deps: Vec<Vec<usize>>,
        k: usize,
        f: impl Fn(usize, &[usize]) -> f64,
    ) -> Result<Self> {
        let functions = deps
            .into_iter()
            .enumerate()
            .map(|(j, deps)| {
                let len = n.pow(deps.len() as u32);
                let table = (0..len)
                    .map(|mut idx| {
                        let mut digits = vec![0; deps.len()];
                        for d in digits.iter_mut().rev() {
                            *d = idx % n;
                            idx /= n;
                        }
                        f(j, &digits)
                    })
                    .collect();
                ReadKFunction { deps, table }
            })
            .collect();
        Self::new(n, functions, k)
    }

    /// Random dependency sets as in [`CoverFamily::random`]; each table is
    /// uniform on [0,1] or, with probability 1/2, a random 0/1 indicator.
    pub fn random(n: usize, m: usize, rng: &mut Rng) -> Result<Self> {
        let cover = CoverFamily::random(n, m, rng);
        let functions = cover
            .sets
            .iter()
            .map(|deps| {
                let len = n.pow(deps.len() as u32);
                let boolean = rng.gen_bool(0.5);
                let table = (0..len)
                    .map(|_| {
                        if boolean {
                            f64::from(u8::from(rng.gen_bool(0.5)))
                        } else {
                            rng.gen::<f64>()
                        }
                    })
                    .collect();
                ReadKFunction {
                    deps: deps.clone(),
                    table,
                }
            })
            .collect();
        Self::new(n, functions, cover.k)
    }

    pub fn n(&self) -> usize {
        self.cover.n
    }

    pub fn k(&self) -> usize {
        self.cover.k
    }

    pub fn functions(&self) -> &[ReadKFunction] {
        &self.functions
    }
}

/// c·k·KL(P‖Q) − Σ_j KL(P_{U_j}‖Q_{U_j}).
pub fn bijection_shearer_gap(p: &BijectionDistribution, cover: &CoverFamily, c: f64) -> Result<f64> {
    if cover.n != p.n {
        return Err(ShearerError::SizeMismatch { cover: cover.n, dist: p.n });
    }
    let whole = p.kl_to_uniform();
    let mut parts = Vec::with_capacity(cover.sets.len());
    for u in &cover.sets {
        parts.push(p.marginal_kl(u)?);
    }
    Ok(c * cover.k as f64 * whole - compensated_sum(parts))
}

/// k·KL(P‖Q) − Σ_j KL(P_{U_j}‖Q_{U_j}) with Q uniform over the full product.
pub fn product_shearer_gap(p: &JointDistribution, cover: &CoverFamily) -> Result<f64> {
    if cover.n != p.dims().len() {
        return Err(ShearerError::SizeMismatch {
            cover: cover.n,
            dist: p.dims().len(),
        });
    }
    let whole = kl_to_uniform(p.table().masses());
    let mut parts = Vec::with_capacity(cover.sets.len());
    for u in &cover.sets {
        parts.push(kl_to_uniform(p.marginal(u)?.masses()));
    }
    Ok(cover.k as f64 * whole - compensated_sum(parts))
}

/// 2k·KL(P‖Q) − m·KL(Ber(p̄)‖Ber(q̄)) where p̄, q̄ are the average expectations
/// of the family under P and under uniform Q.
pub fn read_k_concentration_gap(p: &BijectionDistribution, fam: &ReadKFamily) -> Result<f64> {
    if fam.n() != p.n {
        return Err(ShearerError::SizeMismatch { cover: fam.n(), dist: p.n });
    }
    let m = fam.functions.len();
    if m == 0 {
        return Ok(2.0 * fam.k() as f64 * p.kl_to_uniform());
    }
    let q_mass = 1.0 / p.mass.len() as f64;
    let mut ep = vec![0.0; m];
    let mut eq = vec![0.0; m];
    for_each_permutation(p.n, |r, perm| {
        for (j, f) in fam.functions.iter().enumerate() {
            let v = f.eval(p.n, perm);
            ep[j] += p.mass[r] * v;
            eq[j] += q_mass * v;
        }
    });
    let p_bar = (compensated_sum(ep) / m as f64).clamp(0.0, 1.0);
    let q_bar = (compensated_sum(eq) / m as f64).clamp(0.0, 1.0);
    Ok(2.0 * fam.k() as f64 * p.kl_to_uniform() - m as f64 * kl_bernoulli(p_bar, q_bar)?)
}

/// The n indicator vectors of length n, `e_i` at position i.
pub fn indicator_vectors(n: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
        .collect()
}

/// 9k·KL(P‖Q) − Σ_j KL(P_{U_j}‖Q_{U_j}) for P over the indicator vectors of
/// length n and Q uniform over them.
pub fn indicator_shearer_gap(p: &FiniteDistribution<Vec<u8>>, cover: &CoverFamily) -> Result<f64> {
    let n = cover.n;
    let mut expected = indicator_vectors(n);
    let mut got = p.support().to_vec();
    expected.sort();
    got.sort();
    if expected != got {
        return Err(ShearerError::NotIndicatorSupport(n));
    }
    let q = FiniteDistribution::uniform(p.support().to_vec())?;
    let whole = infotheory::kl_divergence(p, &q)?;
    let mut parts = Vec::with_capacity(cover.sets.len());
    for u in &cover.sets {
        let project = |v: &Vec<u8>| u.iter().map(|&i| v[i]).collect::<Vec<u8>>();
        parts.push(infotheory::kl_divergence(
            &p.push_forward(project),
            &q.push_forward(project),
        )?);
    }
    Ok(9.0 * cover.k as f64 * whole - compensated_sum(parts))
}

/// 4·Σ_i (p_i·ln(n·p_i) − ε_i) − (n·p′·ln(n·p′) − n·ε′), where the remaining
/// n − ℓ coordinates share mass equally: p′ = (1 − Σp_i)/(n − ℓ),
/// ε_i = p_i − 1/n, ε′ = p′ − 1/n.
pub fn technical_lemma_gap(n: usize, probs: &[f64]) -> Result<f64> {
    let l = probs.len();
    if n == 0 || 4 * l > n {
        return Err(ShearerError::LemmaPrecondition("need 4·ℓ ≤ n"));
    }
    if probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(ShearerError::LemmaPrecondition("each p_i must lie in (0, 1)"));
    }
    let total = compensated_sum(probs.iter().copied());
    if total > 1.0 + infotheory::MASS_TOLERANCE {
        return Err(ShearerError::LemmaPrecondition("Σ p_i must not exceed 1"));
    }
    let nf = n as f64;
    let head = compensated_sum(probs.iter().map(|&p| p * (nf * p).ln() - (p - 1.0 / nf)));
    let p_rest = ((1.0 - total) / (n - l) as f64).max(0.0);
    let x = nf * p_rest;
    let x_ln_x = if x > 0.0 { x * x.ln() } else { 0.0 };
    let tail = x_ln_x - (x - 1.0);
    Ok(4.0 * head - tail)
}

/// Σ_j KL(P_{U_j}‖Q_{U_j}) / (k·KL(P‖Q)); 0 when the numerator vanishes or
/// when P = Q.
pub fn shearer_ratio(p: &BijectionDistribution, cover: &CoverFamily) -> Result<f64> {
    let whole = p.kl_to_uniform();
    let mut parts = Vec::with_capacity(cover.sets.len());
    for u in &cover.sets {
        parts.push(p.marginal_kl(u)?);
    }
    let num = compensated_sum(parts);
    let den = cover.k as f64 * whole;
    if den <= infotheory::MASS_TOLERANCE || num <= 0.0 {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// Searches for a P maximizing [`shearer_ratio`]. Starts from the identity
/// point mass and from `trials` Dirichlet samples, each refined by a
/// coordinate-wise multiplicative hill climb.
pub fn extremal_ratio_search(
    n: usize,
    cover: &CoverFamily,
    trials: usize,
    seed: u64,
) -> Result<(f64, BijectionDistribution)> {
    check_n(n, SEARCH_MAX_N)?;
    if cover.n != n {
        return Err(ShearerError::SizeMismatch { cover: cover.n, dist: n });
    }
    let mut rng = seeded(seed);
    let identity: Vec<usize> = (0..n).collect();
    let mut best_p = BijectionDistribution::point_mass(&identity)?;
    let mut best = shearer_ratio(&best_p, cover)?;

    for _ in 0..trials {
        let mut p = BijectionDistribution::dirichlet(n, &mut rng)?;
        let mut score = shearer_ratio(&p, cover)?;
        for _ in 0..HILL_CLIMB_STEPS {
            let mut mass = p.mass.clone();
            let i = rng.gen_range(0..mass.len());
            let g: f64 = StandardNormal.sample(&mut rng);
            mass[i] *= g.exp();
            let total = compensated_sum(mass.iter().copied());
            mass.iter_mut().for_each(|m| *m /= total);
            let Ok(candidate) = BijectionDistribution::new(n, mass) else {
                continue;
            };
            let s = shearer_ratio(&candidate, cover)?;
            if s > score + 1e-12 {
                p = candidate;
                score = s;
            }
        }
        if score > best {
            best = score;
            best_p = p;
        }
    }
    Ok((best, best_p))
}

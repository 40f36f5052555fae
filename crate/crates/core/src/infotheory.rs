//! Entropy, KL divergence and mutual information over explicit finite
//! distributions.
//!
//! Everything is measured in nats (natural logarithms). The conventions
//! `0·ln(1/0) = 0` and `0·ln(0/q) = 0` hold throughout. A KL divergence whose
//! first argument puts mass outside the support of the second is reported as
//! [`INFINITE`], which orders above every finite value.
//!
//! | Function | Quantity |
//! |----------|----------|
//! | [`entropy`] | H(P) = Σ P(x)·ln(1/P(x)) |
//! | [`conditional_entropy`] | H(X\|Y) = Σ_y P(y)·H(X\|Y=y) |
//! | [`kl_divergence`] | KL(P‖Q) = Σ P(x)·ln(P(x)/Q(x)) |
//! | [`conditional_kl`] | E_{P(z)} KL(P_{X\|Z=z} ‖ Q_{X\|Z=z}) |
//! | [`kl_bernoulli`] | KL between two coins |
//! | [`mutual_information`] | KL(P_{X,Y} ‖ P_X × P_Y) |

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use thiserror::Error;

/// Value returned for a divergence that is unbounded.
pub const INFINITE: f64 = f64::INFINITY;

/// Allowed deviation of a total mass from 1, and the slack used for
/// non-negativity checks.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Allowed disagreement between two algebraic routes to the same quantity.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("mass {mass} at index {index} is negative or not finite")]
    BadMass { index: usize, mass: f64 },
    #[error("support has {support} labels but {mass} masses")]
    LengthMismatch { support: usize, mass: usize },
    #[error("duplicate support label at index {0}")]
    DuplicateLabel(usize),
    #[error("distributions are not over the same ordered support")]
    MisalignedSupports,
    #[error("axis sets overlap")]
    OverlappingAxes,
    #[error("target axis set is empty")]
    EmptyTarget,
    #[error("axis {0} is out of range")]
    AxisOutOfRange(usize),
    #[error("joint distributions have different axes")]
    AxesMismatch,
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("mixture weight {0} is outside [0, 1]")]
    BadMixtureWeight(f64),
    #[error("two evaluations of the same identity disagree: {lhs} vs {rhs}")]
    IdentityViolated { lhs: f64, rhs: f64 },
}

pub type Result<T> = std::result::Result<T, InfoError>;

/// Neumaier-compensated sum; keeps the normalization check meaningful for
/// supports with tens of thousands of entries.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Probability mass over an ordered, duplicate-free support.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution<L> {
    support: Vec<L>,
    mass: Vec<f64>,
}

impl<L: Clone + Eq + Hash> FiniteDistribution<L> {
    pub fn new(support: Vec<L>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(InfoError::LengthMismatch {
                support: support.len(),
                mass: mass.len(),
            });
        }
        validate_masses(&mass)?;
        let mut seen = HashSet::with_capacity(support.len());
        for (i, label) in support.iter().enumerate() {
            if !seen.insert(label) {
                return Err(InfoError::DuplicateLabel(i));
            }
        }
        Ok(Self { support, mass })
    }

    /// Builds a distribution from non-negative weights by dividing by their sum.
    pub fn normalized(support: Vec<L>, weights: Vec<f64>) -> Result<Self> {
        let total = compensated_sum(weights.iter().copied());
        if !(total > 0.0) || !total.is_finite() {
            return Err(InfoError::NotNormalized(total));
        }
        Self::new(support, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(support: Vec<L>) -> Result<Self> {
        let n = support.len();
        Self::new(support, vec![1.0 / n as f64; n])
    }

    pub fn point_mass(support: Vec<L>, at: usize) -> Result<Self> {
        let mut mass = vec![0.0; support.len()];
        match mass.get_mut(at) {
            Some(m) => *m = 1.0,
            None => return Err(InfoError::NotNormalized(0.0)),
        }
        Self::new(support, mass)
    }

    pub fn support(&self) -> &[L] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Mass of `label`, or 0 when the label is not in the support.
    pub fn probability(&self, label: &L) -> f64 {
        self.support
            .iter()
            .position(|l| l == label)
            .map_or(0.0, |i| self.mass[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.support.iter().zip(self.mass.iter().copied())
    }

    pub fn expectation(&self, f: impl Fn(&L) -> f64) -> f64 {
        compensated_sum(self.iter().map(|(l, m)| m * f(l)))
    }

    /// Distribution of `f(X)`. The image support is ordered by first
    /// appearance along this support, so two aligned distributions push
    /// forward to aligned distributions.
    pub fn push_forward<M: Clone + Eq + Hash>(
        &self,
        f: impl Fn(&L) -> M,
    ) -> FiniteDistribution<M> {
        let mut index: HashMap<M, usize> = HashMap::new();
        let mut support = Vec::new();
        let mut mass = Vec::new();
        for (label, m) in self.iter() {
            let image = f(label);
            let slot = *index.entry(image.clone()).or_insert_with(|| {
                support.push(image);
                mass.push(0.0);
                support.len() - 1
            });
            mass[slot] += m;
        }
        FiniteDistribution { support, mass }
    }

    /// `λ·self + (1−λ)·other` over the shared support.
    pub fn mixture(&self, lambda: f64, other: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(InfoError::BadMixtureWeight(lambda));
        }
        if !self.aligned_with(other) {
            return Err(InfoError::MisalignedSupports);
        }
        let mass = self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        Ok(Self {
            support: self.support.clone(),
            mass,
        })
    }

    pub fn aligned_with(&self, other: &Self) -> bool {
        self.support == other.support
    }
}

pub(crate) fn validate_masses(mass: &[f64]) -> Result<()> {
    for (index, &m) in mass.iter().enumerate() {
        if !m.is_finite() || m < 0.0 {
            return Err(InfoError::BadMass { index, mass: m });
        }
    }
    let total = compensated_sum(mass.iter().copied());
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(InfoError::NotNormalized(total));
    }
    Ok(())
}

/// Joint distribution of named coordinates, stored row-major over the
/// Cartesian product of the per-axis supports `0..dims[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    axes: Vec<String>,
    dims: Vec<usize>,
    table: FiniteDistribution<Vec<usize>>,
}

impl JointDistribution {
    pub fn new(axes: Vec<String>, dims: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        if axes.len() != dims.len() {
            return Err(InfoError::LengthMismatch {
                support: axes.len(),
                mass: dims.len(),
            });
        }
        let support = product_labels(&dims);
        let table = FiniteDistribution::new(support, mass)?;
        Ok(Self { axes, dims, table })
    }

    /// Convenience constructor naming the axes `X0, X1, …`.
    pub fn unnamed(dims: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        let axes = (0..dims.len()).map(|i| format!("X{i}")).collect();
        Self::new(axes, dims, mass)
    }

    pub fn axes(&self) -> &[String] {
        &self.axes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn table(&self) -> &FiniteDistribution<Vec<usize>> {
        &self.table
    }

    pub fn axis_index(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a == name)
    }

    /// Projection onto `axes` (in the given order), row-major over their
    /// supports. The empty projection is a point mass on the empty tuple.
    pub fn marginal(&self, axes: &[usize]) -> Result<FiniteDistribution<Vec<usize>>> {
        let mass = self.marginal_masses(axes)?;
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        Ok(FiniteDistribution {
            support: product_labels(&dims),
            mass,
        })
    }

    fn marginal_masses(&self, axes: &[usize]) -> Result<Vec<f64>> {
        let mut seen = HashSet::new();
        for &a in axes {
            if a >= self.dims.len() {
                return Err(InfoError::AxisOutOfRange(a));
            }
            if !seen.insert(a) {
                return Err(InfoError::OverlappingAxes);
            }
        }
        let size: usize = axes.iter().map(|&a| self.dims[a]).product();
        let mut out = vec![0.0; size];
        for (label, m) in self.table.iter() {
            let mut idx = 0;
            for &a in axes {
                idx = idx * self.dims[a] + label[a];
            }
            out[idx] += m;
        }
        Ok(out)
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.axes == other.axes && self.dims == other.dims
    }
}

fn product_labels(dims: &[usize]) -> Vec<Vec<usize>> {
    let size: usize = dims.iter().product();
    let mut labels = Vec::with_capacity(size);
    let mut current = vec![0usize; dims.len()];
    for _ in 0..size {
        labels.push(current.clone());
        for pos in (0..dims.len()).rev() {
            current[pos] += 1;
            if current[pos] < dims[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
    labels
}

fn disjoint(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    let mut all = a.to_vec();
    for &x in b {
        if a.contains(&x) {
            return Err(InfoError::OverlappingAxes);
        }
        all.push(x);
    }
    Ok(all)
}

/// Σ m·ln(1/m) over a mass vector.
pub(crate) fn entropy_of(mass: &[f64]) -> f64 {
    compensated_sum(
        mass.iter()
            .filter(|&&m| m > 0.0)
            .map(|&m| -m * m.ln()),
    )
}

/// KL divergence between aligned mass vectors.
pub(crate) fn kl_of(p: &[f64], q: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(p.len());
    for (&pm, &qm) in p.iter().zip(q) {
        if pm > 0.0 {
            if qm <= 0.0 {
                return INFINITE;
            }
            terms.push(pm * (pm / qm).ln());
        }
    }
    // Rounding can push an exact zero slightly negative.
    compensated_sum(terms).max(0.0)
}

pub fn entropy<L: Clone + Eq + Hash>(p: &FiniteDistribution<L>) -> f64 {
    entropy_of(&p.mass)
}

/// H(target | given), evaluated as Σ_y P(y)·H(target | given = y) and
/// cross-checked against H(target, given) − H(given).
pub fn conditional_entropy(
    joint: &JointDistribution,
    target: &[usize],
    given: &[usize],
) -> Result<f64> {
    if target.is_empty() {
        return Err(InfoError::EmptyTarget);
    }
    let axes = disjoint(given, target)?;
    let both = joint.marginal_masses(&axes)?;
    let block: usize = target.iter().map(|&a| joint.dims[a]).product();

    let mut terms = Vec::new();
    for chunk in both.chunks(block) {
        let py = compensated_sum(chunk.iter().copied());
        if py > 0.0 {
            let cond: Vec<f64> = chunk.iter().map(|m| m / py).collect();
            terms.push(py * entropy_of(&cond));
        }
    }
    let direct = compensated_sum(terms);

    let chain = entropy_of(&both) - entropy_of(&joint.marginal_masses(given)?);
    if (direct - chain).abs() > IDENTITY_TOLERANCE {
        return Err(InfoError::IdentityViolated {
            lhs: direct,
            rhs: chain,
        });
    }
    Ok(direct)
}

pub fn kl_divergence<L: Clone + Eq + Hash>(
    p: &FiniteDistribution<L>,
    q: &FiniteDistribution<L>,
) -> Result<f64> {
    if !p.aligned_with(q) {
        return Err(InfoError::MisalignedSupports);
    }
    Ok(kl_of(&p.mass, &q.mass))
}

/// E_{P(given)} KL(P_{target|given} ‖ Q_{target|given}). Conditioning values
/// of zero P-probability carry no weight; a conditioning value that P reaches
/// but Q does not makes the divergence infinite.
pub fn conditional_kl(
    p_joint: &JointDistribution,
    q_joint: &JointDistribution,
    target: &[usize],
    given: &[usize],
) -> Result<f64> {
    if !p_joint.same_shape(q_joint) {
        return Err(InfoError::AxesMismatch);
    }
    if target.is_empty() {
        return Err(InfoError::EmptyTarget);
    }
    let axes = disjoint(given, target)?;
    let p = p_joint.marginal_masses(&axes)?;
    let q = q_joint.marginal_masses(&axes)?;
    let block: usize = target.iter().map(|&a| p_joint.dims[a]).product();

    let mut terms = Vec::new();
    for (pc, qc) in p.chunks(block).zip(q.chunks(block)) {
        let pz = compensated_sum(pc.iter().copied());
        if pz <= 0.0 {
            continue;
        }
        let qz = compensated_sum(qc.iter().copied());
        if qz <= 0.0 {
            return Ok(INFINITE);
        }
        let pcond: Vec<f64> = pc.iter().map(|m| m / pz).collect();
        let qcond: Vec<f64> = qc.iter().map(|m| m / qz).collect();
        let kl = kl_of(&pcond, &qcond);
        if kl.is_infinite() {
            return Ok(INFINITE);
        }
        terms.push(pz * kl);
    }
    Ok(compensated_sum(terms))
}

/// KL divergence between Bernoulli(p) and Bernoulli(q).
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    for x in [p, q] {
        if !(0.0..=1.0).contains(&x) {
            return Err(InfoError::ProbabilityOutOfRange(x));
        }
    }
    Ok(kl_of(&[p, 1.0 - p], &[q, 1.0 - q]))
}

/// I(a; b) as KL(P_{a,b} ‖ P_a × P_b), cross-checked against H(a) − H(a|b).
pub fn mutual_information(joint: &JointDistribution, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let axes = disjoint(a, b)?;
    let pab = joint.marginal_masses(&axes)?;
    let pa = joint.marginal_masses(a)?;
    let pb = joint.marginal_masses(b)?;
    let product: Vec<f64> = pa
        .iter()
        .flat_map(|x| pb.iter().map(move |y| x * y))
        .collect();
    let mi = kl_of(&pab, &product);

    let by_entropy = entropy_of(&pa) - conditional_entropy(joint, a, b)?;
    if (mi - by_entropy).abs() > IDENTITY_TOLERANCE {
        return Err(InfoError::IdentityViolated {
            lhs: mi,
            rhs: by_entropy,
        });
    }
    Ok(mi)
}

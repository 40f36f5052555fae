//! The multi-instance DLOG game against one fixed permutation, played by the
//! non-adaptive adversary that reuses a single query sequence per instance.

use std::collections::HashMap;

use rand::Rng as _;

use super::numtheory::{generator, inv_mod, mul_mod, pow_mod};
use crate::pcmodel::{is_prime, GameError, Permutation, Result};
use crate::seeded;

/// The constant c in the guessing threshold ⌈c·N/T²⌉.
pub const MI_GUESS_CONSTANT: u64 = 4;

pub fn guess_threshold(n: u64, t: usize) -> usize {
    let t2 = (t * t) as u64;
    ((MI_GUESS_CONSTANT * n).div_ceil(t2)) as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiConfig {
    pub n: u64,
    pub t: usize,
    pub instances: usize,
    /// Make the guesses of the first instances correct, isolating the
    /// determination step from the (tiny) probability of guessing them all.
    pub forced_guess: bool,
    pub seed: u64,
}

impl MiConfig {
    /// 4·⌈N/T²⌉ instances.
    pub fn default_instances(n: u64, t: usize) -> usize {
        4 * n.div_ceil((t * t) as u64) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiOutcome {
    pub all_correct: bool,
    /// Fraction of the instances past the guessing threshold whose secret was
    /// derived from a collision (0 when there are none).
    pub determined_fraction: f64,
    /// Fraction of the N−1 cyclic windows of T/2 consecutive exponents that
    /// contain the exponent of some translated query, at the end of the game.
    pub interval_coverage: f64,
    pub generator: u64,
}

/// Query multipliers a_1..a_T: g^{−i} for i ≤ T/2, then g^{(i−T/2)·T}.
fn multipliers(n: u64, g: u64, t: usize) -> Vec<u64> {
    let half = t / 2;
    let ginv = inv_mod(g, n).expect("generator is a unit");
    (1..=t)
        .map(|i| {
            if i <= half {
                pow_mod(ginv, i as u64, n)
            } else {
                pow_mod(g, ((i - half) * t) as u64, n)
            }
        })
        .collect()
}

pub fn run_mi_game(cfg: &MiConfig) -> Result<MiOutcome> {
    let n = cfg.n;
    if !is_prime(n) {
        return Err(GameError::NotPrime(n));
    }
    if cfg.t < 2 || !cfg.t.is_multiple_of(2) || (cfg.t / 2) as u64 >= n - 1 {
        return Err(GameError::Invalid(format!("T = {} must be even with T/2 < N − 1 = {}", cfg.t, n - 1)));
    }
    if n > crate::pcmodel::MAX_N {
        return Err(GameError::SizeOutOfRange(n));
    }
    let g = generator(n).ok_or_else(|| GameError::Invalid(format!("no generator found for {n}")))?;
    let a = multipliers(n, g, cfg.t);
    let threshold = guess_threshold(n, cfg.t);

    let mut rng = seeded(cfg.seed);
    let sigma = Permutation::random(n, &mut rng);

    // Output of σ ↦ (instance, query index) of its first occurrence.
    let mut seen: HashMap<u64, (usize, usize)> = HashMap::new();
    let mut outputs = Vec::with_capacity(cfg.instances);
    let mut all_correct = true;
    let mut determined = 0usize;
    let mut queried = vec![false; n as usize];

    for i in 0..cfg.instances {
        let d = rng.gen_range(0..n);
        let answers: Vec<u64> = a
            .iter()
            .map(|&aj| {
                let x = mul_mod(aj, d, n);
                queried[x as usize] = true;
                sigma.apply(x)
            })
            .collect();

        let collision = answers.iter().enumerate().find_map(|(j, y)| seen.get(y).map(|&(i2, j2)| (j, i2, j2)));
        let guess = rng.gen_range(0..n);
        let out = if i < threshold {
            if cfg.forced_guess {
                d
            } else {
                guess
            }
        } else if let Some((j, i2, j2)) = collision {
            determined += 1;
            let inv = inv_mod(a[j], n).expect("multipliers are units");
            mul_mod(mul_mod(a[j2], inv, n), outputs[i2], n)
        } else {
            guess
        };
        all_correct &= out == d;
        outputs.push(out);
        for (j, y) in answers.into_iter().enumerate() {
            seen.entry(y).or_insert((i, j));
        }
    }

    let post = cfg.instances.saturating_sub(threshold);
    let determined_fraction = if post == 0 { 0.0 } else { determined as f64 / post as f64 };
    Ok(MiOutcome {
        all_correct,
        determined_fraction,
        interval_coverage: window_coverage(n, g, &queried, cfg.t / 2),
        generator: g,
    })
}

/// Fraction of cyclic windows {e, …, e+len−1} of exponents mod N−1 holding
/// at least one e' with g^{e'} queried.
fn window_coverage(n: u64, g: u64, queried: &[bool], len: usize) -> f64 {
    let order = (n - 1) as usize;
    let mut hit = Vec::with_capacity(order);
    let mut x = 1;
    for _ in 0..order {
        hit.push(queried[x as usize]);
        x = mul_mod(x, g, n);
    }
    let mut inside = hit[..len].iter().filter(|&&h| h).count();
    let mut covered = 0;
    for e in 0..order {
        covered += usize::from(inside > 0);
        inside -= usize::from(hit[e]);
        inside += usize::from(hit[(e + len) % order]);
    }
    covered as f64 / order as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u64, t: usize, instances: usize, seed: u64) -> MiConfig {
        MiConfig { n, t, instances, forced_guess: true, seed }
    }

    #[test]
    fn threshold_and_instances() {
        assert_eq!(guess_threshold(1009, 60), 2);
        assert_eq!(MiConfig::default_instances(1009, 60), 4);
    }

    #[test]
    fn validation() {
        assert!(run_mi_game(&cfg(1000, 10, 4, 0)).is_err());
        assert!(run_mi_game(&cfg(101, 7, 4, 0)).is_err());
        assert!(run_mi_game(&cfg(11, 20, 4, 0)).is_err());
    }

    #[test]
    fn multipliers_follow_the_schedule() {
        let (n, g, t) = (1009, 11, 6);
        let a = multipliers(n, g, t);
        for i in 1..=3 {
            assert_eq!(mul_mod(a[i - 1], pow_mod(g, i as u64, n), n), 1);
        }
        assert_eq!(a[3], pow_mod(g, 6, n));
        assert_eq!(a[5], pow_mod(g, 18, n));
    }

    #[test]
    fn single_instance_is_a_guess() {
        let out = run_mi_game(&cfg(101, 4, 1, 3)).unwrap();
        assert_eq!(out.determined_fraction, 0.0);
        assert!(out.all_correct);
    }

    #[test]
    fn window_coverage_counts_cyclic_windows() {
        // g = 2 generates Z_5^*: exponents 0,1,2,3 ↦ 1,2,4,3.
        let mut q = vec![false; 5];
        q[4] = true; // exponent 2
        assert_eq!(window_coverage(5, 2, &q, 1), 0.25);
        assert_eq!(window_coverage(5, 2, &q, 2), 0.5);
        assert_eq!(window_coverage(5, 2, &q, 4), 1.0);
    }

    #[test]
    fn full_coverage_determines_everything() {
        // With T²/2 ≥ N every later instance with d ≠ 0 collides with an
        // earlier one. A zero secret (probability 1/101 per instance) only
        // collides with another zero.
        let mut n_det = 0;
        for seed in 0..50 {
            let out = run_mi_game(&cfg(101, 20, 12, seed)).unwrap();
            assert!(out.interval_coverage > 0.99);
            n_det += usize::from(out.determined_fraction == 1.0 && out.all_correct);
        }
        assert!(n_det >= 40, "{n_det}");
    }
}

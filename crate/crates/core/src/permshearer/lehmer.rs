//! Lexicographic ranking of permutations and of injective tuples.

/// n!, for n small enough to enumerate.
pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Number of injective k-tuples drawn from n values: n!/(n−k)!.
pub fn falling(n: usize, k: usize) -> usize {
    ((n - k + 1)..=n).product()
}

/// Rank of an injective tuple over `0..n` among all injective tuples of the
/// same length, in lexicographic order. A full permutation gets its Lehmer rank.
pub fn rank_tuple(n: usize, tuple: &[usize]) -> usize {
    let k = tuple.len();
    let mut used = 0u64;
    let mut rank = 0;
    for (i, &x) in tuple.iter().enumerate() {
        let below = (used & ((1u64 << x) - 1)).count_ones() as usize;
        rank += (x - below) * falling(n - 1 - i, k - 1 - i);
        used |= 1 << x;
    }
    rank
}

/// Inverse of [`rank_tuple`].
pub fn unrank_tuple(n: usize, k: usize, mut rank: usize) -> Vec<usize> {
    let mut free: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let block = falling(n - 1 - i, k - 1 - i);
        let digit = rank / block;
        rank %= block;
        out.push(free.remove(digit));
    }
    out
}

pub fn rank(perm: &[usize]) -> usize {
    rank_tuple(perm.len(), perm)
}

pub fn unrank(n: usize, rank: usize) -> Vec<usize> {
    unrank_tuple(n, n, rank)
}

/// Calls `f(rank, perm)` for every permutation of `0..n` in rank order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(usize, &[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut r = 0;
    loop {
        f(r, &perm);
        r += 1;
        // Standard next-permutation step.
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_ranks() {
        assert_eq!(rank(&[0, 1, 2]), 0);
        assert_eq!(rank(&[2, 1, 0]), 5);
        assert_eq!(rank(&[1, 0, 2]), 2);
        assert_eq!(unrank(4, 23), vec![3, 2, 1, 0]);
        assert_eq!(rank_tuple(4, &[]), 0);
        assert_eq!(rank_tuple(4, &[3, 2]), 11);
    }

    #[test]
    fn round_trip_up_to_eight() {
        for n in 0..=8 {
            let mut count = 0;
            for_each_permutation(n, |r, p| {
                assert_eq!(rank(p), r);
                assert_eq!(unrank(n, r), p);
                count += 1;
            });
            assert_eq!(count, factorial(n));
        }
    }

    #[test]
    fn tuple_ranks_are_dense() {
        let n = 5;
        for k in 0..=n {
            for r in 0..falling(n, k) {
                let t = unrank_tuple(n, k, r);
                assert_eq!(rank_tuple(n, &t), r);
            }
        }
    }
}

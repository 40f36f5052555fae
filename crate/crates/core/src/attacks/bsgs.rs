//! Baby-step giant-step with the baby steps moved into preprocessing.

use crate::pcmodel::{
    Adaptivity, Adversary, Advice, Answer, GameError, OuterQuery, Oracle, Permutation, QueryPlan,
    Result,
};
use crate::Rng;

use super::point_width;

/// Advice: the `table` pairs (σ(j), j) for j < table, sorted by σ(j).
/// Online: `giant` outer queries (1, i·table), answered by σ(d + i·table).
/// Succeeds exactly when d lies within `giant` strides of the table, i.e.
/// with probability min(table·giant, N)/N.
#[derive(Debug, Clone)]
pub struct Bsgs {
    n: u64,
    table: u64,
    giant: u64,
}

impl Bsgs {
    pub fn new(n: u64, table: u64, giant: u64) -> Result<Self> {
        if table == 0 || table > n {
            return Err(GameError::Invalid(format!("BSGS table size {table} must lie in 1..={n}")));
        }
        Ok(Self { n, table, giant })
    }

    /// The classical choice m = ⌈√N⌉ for both table and giant steps.
    pub fn square_root(n: u64) -> Result<Self> {
        let m = (n as f64).sqrt().ceil() as u64;
        Self::new(n, m, m)
    }

    fn entry_bits(&self) -> u32 {
        2 * point_width(self.n)
    }
}

impl Adversary for Bsgs {
    fn name(&self) -> &str {
        "bsgs"
    }

    fn adaptivity(&self) -> Adaptivity {
        Adaptivity::NonAdaptive
    }

    fn s_bits(&self) -> usize {
        self.table as usize * self.entry_bits() as usize
    }

    fn preprocess(&self, sigma: &Permutation, _: &mut Rng) -> Advice {
        let mut pairs: Vec<(u64, u64)> = (0..self.table).map(|j| (sigma.apply(j), j)).collect();
        pairs.sort_unstable();
        let w = point_width(self.n);
        let mut advice = Advice::new();
        for (y, j) in pairs {
            advice.push(y, w);
            advice.push(j, w);
        }
        advice
    }

    fn online(&self, advice: &Advice, oracle: &mut Oracle<'_>, _: &mut Rng) -> Result<Answer> {
        let n = self.n;
        let plan = QueryPlan {
            inner: vec![],
            outer: (0..self.giant)
                .map(|i| OuterQuery::Linear { a: 1, b: (i as u128 * self.table as u128 % n as u128) as u64 })
                .collect(),
        };
        let answers = oracle.commit(&plan)?;

        let w = point_width(n);
        let mut reader = advice.reader();
        let table: Vec<(u64, u64)> = (0..advice.len() / self.entry_bits() as usize)
            .map(|_| (reader.read(w), reader.read(w)))
            .collect();
        for (i, &y) in answers.outer.iter().enumerate() {
            if let Ok(pos) = table.binary_search_by_key(&y, |&(s, _)| s) {
                let j = table[pos].1;
                let shift = (i as u128 * self.table as u128 % n as u128) as u64;
                return Ok(Answer::Dlog((j + n - shift) % n));
            }
        }
        Ok(Answer::Dlog(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcmodel::{play_with_advice, GameKind, PCGame, Secret};
    use crate::seeded;

    fn exhaustive_rate(n: u64, table: u64, giant: u64, seed: u64) -> f64 {
        let game = PCGame::new(GameKind::Dlog, n).unwrap();
        let adv = Bsgs::new(n, table, giant).unwrap();
        let mut rng = seeded(seed);
        let sigma = Permutation::random(n, &mut rng);
        let advice = adv.preprocess(&sigma, &mut rng);
        assert!(advice.len() <= adv.s_bits());
        let mut wins = 0;
        for d in 0..n {
            let t = play_with_advice(&game, &adv, &sigma, advice.clone(), &Secret::Dlog(d), &mut rng).unwrap();
            assert_eq!(t.t(), giant as usize);
            wins += usize::from(t.success);
        }
        wins as f64 / n as f64
    }

    #[test]
    fn full_coverage_at_101() {
        assert_eq!(exhaustive_rate(101, 11, 11, 0), 1.0);
    }

    #[test]
    fn single_entry_table_at_five() {
        assert_eq!(exhaustive_rate(5, 1, 1, 3), 0.2);
    }

    #[test]
    fn partial_coverage_is_exact() {
        // 4·5 = 20 residues covered out of 101.
        assert_eq!(exhaustive_rate(101, 4, 5, 8), 20.0 / 101.0);
    }

    #[test]
    fn first_row_matches_on_first_query() {
        let game = PCGame::new(GameKind::Dlog, 101).unwrap();
        let adv = Bsgs::square_root(101).unwrap();
        let sigma = Permutation::random(101, &mut seeded(5));
        let t = crate::pcmodel::play_game(&game, &adv, &sigma, &Secret::Dlog(7), &mut seeded(1)).unwrap();
        assert!(t.success);
        assert_eq!(sigma.apply(7), t.outer_answers[0]);
    }
}

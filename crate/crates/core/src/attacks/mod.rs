//! Reference adversaries: the attacks whose success the bounds are measured
//! against, plus the multi-instance DLOG game.

mod bsgs;
mod chain;
mod daemen;
mod mi;
pub mod numtheory;
mod rho;
mod sqddh;

pub use bsgs::Bsgs;
pub use chain::ChainDlog;
pub use daemen::Daemen;
pub use mi::{guess_threshold, run_mi_game, MiConfig, MiOutcome, MI_GUESS_CONSTANT};
pub use rho::PollardRho;
pub use sqddh::SqddhDistinguisher;

use rand::Rng as _;

use crate::pcmodel::{
    Adaptivity, Adversary, Advice, Answer, GameError, GameKind, Oracle, Permutation, QueryPlan,
    Result,
};
use crate::Rng;

/// Bits needed to store one point of [n].
pub(crate) fn point_width(n: u64) -> u32 {
    (64 - (n - 1).leading_zeros()).max(1)
}

/// Names accepted by [`build_attack`].
pub const ATTACK_NAMES: [&str; 6] = ["bsgs", "rho", "chain", "daemen", "sqddh", "guess"];

/// No advice, no queries, a uniformly random answer.
#[derive(Debug, Clone)]
pub struct Guess {
    kind: GameKind,
    n: u64,
}

impl Guess {
    pub fn new(kind: GameKind, n: u64) -> Self {
        Self { kind, n }
    }
}

impl Adversary for Guess {
    fn name(&self) -> &str {
        "guess"
    }

    fn adaptivity(&self) -> Adaptivity {
        Adaptivity::NonAdaptive
    }

    fn s_bits(&self) -> usize {
        0
    }

    fn preprocess(&self, _: &Permutation, _: &mut Rng) -> Advice {
        Advice::new()
    }

    fn online(&self, _: &Advice, oracle: &mut Oracle<'_>, rng: &mut Rng) -> Result<Answer> {
        oracle.commit(&QueryPlan::default())?;
        let n = self.n;
        Ok(match self.kind {
            GameKind::Dlog => Answer::Dlog(rng.gen_range(0..n)),
            GameKind::Ddh | GameKind::Sqddh => Answer::Bit(rng.gen()),
            GameKind::EmKr => Answer::Keys(rng.gen_range(0..n), rng.gen_range(0..n)),
            GameKind::EmKrSingle => Answer::Key(rng.gen_range(0..n)),
        })
    }
}

/// Builds the named attack for a game of size `n` within `s_bits` of advice
/// and `t` queries. Parameters the attack cannot use fully are rounded down.
pub fn build_attack(
    kind: GameKind,
    name: &str,
    n: u64,
    s_bits: usize,
    t: usize,
    seed: u64,
) -> Result<Box<dyn Adversary>> {
    let w = point_width(n) as usize;
    let wrong_game = || GameError::Invalid(format!("attack {name} does not apply to {}", kind.name()));
    match name {
        "guess" => Ok(Box::new(Guess::new(kind, n))),
        "bsgs" | "rho" | "chain" if kind != GameKind::Dlog => Err(wrong_game()),
        "bsgs" => {
            let table = (s_bits / (2 * w)).min(n as usize).max(1);
            Ok(Box::new(Bsgs::new(n, table as u64, t as u64)?))
        }
        "rho" => Ok(Box::new(PollardRho::new(n, t))),
        "chain" => Ok(Box::new(ChainDlog::new(n, s_bits / (2 * w), t, seed)?)),
        "daemen" => {
            let single = match kind {
                GameKind::EmKr => false,
                GameKind::EmKrSingle => true,
                _ => return Err(wrong_game()),
            };
            let mut t1 = 8u64;
            while t1 * 2 <= n && (t1 * 2) as usize * w <= s_bits {
                t1 *= 2;
            }
            Ok(Box::new(Daemen::new(n, t1.min(n), t as u64, 1, single)?))
        }
        "sqddh" if kind != GameKind::Sqddh => Err(wrong_game()),
        "sqddh" => Ok(Box::new(SqddhDistinguisher::new(n, s_bits.max(1), t, seed)?)),
        _ => Err(GameError::Invalid(format!("unknown attack {name}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcmodel::{play_game, PCGame};
    use crate::seeded;

    #[test]
    fn widths() {
        assert_eq!(point_width(2), 1);
        assert_eq!(point_width(5), 3);
        assert_eq!(point_width(8), 3);
        assert_eq!(point_width(1009), 10);
        assert_eq!(point_width(1 << 10), 10);
    }

    #[test]
    fn factory_checks_game() {
        assert!(build_attack(GameKind::Ddh, "bsgs", 101, 100, 10, 0).is_err());
        assert!(build_attack(GameKind::Dlog, "daemen", 101, 100, 10, 0).is_err());
        assert!(build_attack(GameKind::Dlog, "sqddh", 101, 100, 10, 0).is_err());
        assert!(build_attack(GameKind::Dlog, "nope", 101, 100, 10, 0).is_err());
    }

    #[test]
    fn factory_respects_budgets() {
        let cases = [
            (GameKind::Dlog, "bsgs", 1009, 200, 12),
            (GameKind::Dlog, "rho", 1009, 0, 30),
            (GameKind::Dlog, "chain", 1009, 400, 16),
            (GameKind::EmKr, "daemen", 1024, 320, 64),
            (GameKind::EmKrSingle, "daemen", 1024, 320, 64),
            (GameKind::Sqddh, "sqddh", 1009, 16, 8),
            (GameKind::Ddh, "guess", 101, 0, 0),
        ];
        let mut rng = seeded(3);
        for (kind, name, n, s, t) in cases {
            let game = PCGame::new(kind, n).unwrap();
            let adv = build_attack(kind, name, n, s, t, 7).unwrap();
            assert!(adv.s_bits() <= s.max(8 * point_width(n) as usize), "{name}");
            for _ in 0..5 {
                let sigma = Permutation::random(n, &mut rng);
                let secret = game.sample_secret(&mut rng);
                let tr = play_game(&game, adv.as_ref(), &sigma, &secret, &mut rng).unwrap();
                assert!(tr.t() <= t, "{name}");
                assert!(tr.advice.len() <= adv.s_bits(), "{name}");
            }
        }
    }
}

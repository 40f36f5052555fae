//! Sweep configuration: a TOML file with one `[[spec]]` table per experiment,
//! keys spelled like the CLI flags.
//!
//! ```toml
//! [[spec]]
//! game = "dlog"
//! attack = "bsgs"
//! n = 101
//! s-bits = 154
//! t = 11
//! trials = 1000
//! seed = 1
//! theorem = "T41"   # optional
//! ```

use std::path::Path;

use permchal_core::pcmodel::{GameKind, Theorem};
use serde::Deserialize;

use crate::runner::ExperimentSpec;
use crate::{HarnessError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    spec: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct Entry {
    game: GameKind,
    attack: String,
    n: u64,
    s_bits: usize,
    t: usize,
    trials: usize,
    #[serde(default)]
    seed: u64,
    theorem: Option<String>,
}

pub fn parse_config(text: &str) -> Result<Vec<ExperimentSpec>> {
    let file: ConfigFile = toml::from_str(text)?;
    file.spec
        .into_iter()
        .map(|e| {
            let theorem = match e.theorem {
                None => None,
                Some(name) => Some(
                    Theorem::parse(&name)
                        .ok_or_else(|| HarnessError::Validation(format!("unknown theorem {name}")))?,
                ),
            };
            let spec = ExperimentSpec {
                game: e.game,
                attack: e.attack,
                n: e.n,
                s_bits: e.s_bits,
                t: e.t,
                trials: e.trials,
                seed: e.seed,
                theorem,
            };
            spec.validate()?;
            Ok(spec)
        })
        .collect()
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentSpec>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Validation(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// The grid used when `sweep` is given no config file.
pub fn default_grid(trials: usize, seed: u64) -> Vec<ExperimentSpec> {
    let mut specs = Vec::new();
    let mut push = |game, attack: &str, n, s_bits, t| {
        specs.push(ExperimentSpec {
            game,
            attack: attack.into(),
            n,
            s_bits,
            t,
            trials,
            seed,
            theorem: None,
        })
    };
    // BSGS: 3×3 (table, T) grids; each table entry costs 2⌈log₂N⌉ bits.
    for (n, w, sizes) in [(101u64, 7usize, [3usize, 6, 11]), (1009, 10, [8, 16, 32])] {
        for &table in &sizes {
            for &t in &sizes {
                push(GameKind::Dlog, "bsgs", n, 2 * w * table, t);
            }
        }
    }
    for t in [16, 32] {
        push(GameKind::Dlog, "rho", 1009, 0, t);
        push(GameKind::Dlog, "chain", 1009, 32 * 20, t);
    }
    for (t1, t) in [(16usize, 16usize), (16, 64), (64, 64)] {
        push(GameKind::EmKr, "daemen", 1024, 10 * t1, t);
    }
    push(GameKind::EmKrSingle, "daemen", 1024, 10 * 64, 64);
    for s in [8, 32, 128] {
        push(GameKind::Sqddh, "sqddh", 8191, s, 16);
    }
    push(GameKind::Ddh, "guess", 1009, 0, 0);
    specs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries() {
        let specs = parse_config(
            r#"
            [[spec]]
            game = "dlog"
            attack = "bsgs"
            n = 101
            s-bits = 154
            t = 11
            trials = 10
            seed = 3

            [[spec]]
            game = "em1k"
            attack = "daemen"
            n = 256
            s-bits = 128
            t = 32
            trials = 5
            theorem = "t41"
            "#,
        )
        .unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].s_bits, 154);
        assert_eq!(specs[1].game, GameKind::EmKrSingle);
        assert_eq!(specs[1].theorem, Some(Theorem::T41));
        assert_eq!(specs[1].seed, 0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let base = "[[spec]]\ngame = \"dlog\"\nattack = \"bsgs\"\nn = 101\ns-bits = 1\nt = 1\ntrials = 1\n";
        assert!(parse_config(base).is_ok());
        assert!(parse_config(&format!("{base}colour = 1\n")).is_err());
        assert!(parse_config(&base.replace("dlog", "rsa")).is_err());
        assert!(parse_config(&base.replace("n = 101", "n = 100")).is_err());
        assert!(parse_config(&format!("{base}theorem = \"T99\"\n")).is_err());
        assert!(parse_config("other = 1").is_err());
    }

    #[test]
    fn default_grid_is_valid() {
        let grid = default_grid(10, 1);
        assert!(grid.iter().all(|s| s.validate().is_ok()));
        assert_eq!(grid.iter().filter(|s| s.attack == "bsgs").count(), 18);
    }
}

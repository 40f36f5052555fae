//! Upper bounds on the success probability of non-adaptive (S, T) algorithms
//! with preprocessing.
//!
//! `max_s` stands for the best success probability of a non-adaptive
//! algorithm with T queries and no preprocessing. Every value is clamped to
//! [0, 1]. The `ln 2` factors convert the advice length from bits to nats.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::{GameError, GameKind, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// General bound for a u-uniform translation.
    T41,
    /// Discrete logarithm.
    T11,
    /// DDH and sqDDH.
    T12,
    /// Even-Mansour key recovery.
    T13,
    /// Identity post-processing.
    TE1,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [Theorem::T41, Theorem::T11, Theorem::T12, Theorem::T13, Theorem::TE1];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T41 => "T41",
            Theorem::T11 => "T11",
            Theorem::T12 => "T12",
            Theorem::T13 => "T13",
            Theorem::TE1 => "TE1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s))
    }

    /// The specialised bound for a game kind.
    pub fn for_game(kind: GameKind) -> Self {
        match kind {
            GameKind::Dlog => Theorem::T11,
            GameKind::Ddh | GameKind::Sqddh => Theorem::T12,
            GameKind::EmKr | GameKind::EmKrSingle => Theorem::T13,
        }
    }
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `n` enters the specialised bounds, `u` the general ones.
pub fn evaluate_bound(theorem: Theorem, n: f64, s_bits: f64, t: f64, u: f64, max_s: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(GameError::Invalid(format!("uniformity u = {u} must be positive")));
    }
    if !(n > 0.0) {
        return Err(GameError::Invalid(format!("N = {n} must be positive")));
    }
    for (name, v) in [("S", s_bits), ("T", t), ("MaxS", max_s)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(GameError::Invalid(format!("{name} = {v} must be a non-negative number")));
        }
    }
    let st = s_bits * t;
    let value = match theorem {
        Theorem::T41 => f64::min(
            2.0 * max_s + 4.0 * LN_2 * st / u + t * t / u,
            max_s + (LN_2 * st / u).sqrt() + t * t / (2.0 * u),
        ),
        Theorem::T11 => 2.0 * max_s + 4.0 * LN_2 * st / n + t * t / n,
        Theorem::T12 => max_s + (2.0 * LN_2 * st / n).sqrt() + t * t / n,
        Theorem::T13 => 2.0 * max_s + 4.0 * LN_2 * s_bits * (t + 1.0) / n + t * t / n,
        Theorem::TE1 => f64::min(2.0 * max_s + 4.0 * LN_2 * st / u, max_s + (LN_2 * st / u).sqrt()),
    };
    Ok(value.clamp(0.0, 1.0))
}

/// The no-preprocessing success probability plugged into the bounds:
/// T²/N for discrete log and Even-Mansour, 1/2 + T²/N for the decision games.
pub fn default_max_s(kind: GameKind, n: f64, t: f64) -> f64 {
    let base = t * t / n;
    match kind {
        GameKind::Ddh | GameKind::Sqddh => 0.5 + base,
        _ => base,
    }
}

/// Exact uniformity of each game's translation.
pub fn closed_form_uniformity(kind: GameKind, n: f64) -> f64 {
    match kind {
        GameKind::Dlog | GameKind::EmKr | GameKind::EmKrSingle => n,
        GameKind::Ddh => 2.0 * n * n / (3.0 * n - 1.0),
        GameKind::Sqddh => 2.0 * n / 3.0,
    }
}

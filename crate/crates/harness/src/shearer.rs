use permchal_core::permshearer::{
    bijection_shearer_gap, extremal_ratio_search, read_k_concentration_gap, BijectionDistribution,
    CoverFamily, ReadKFamily, SEARCH_MAX_N,
};
use permchal_core::seeded;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::stats::derive_trial_seed;
use crate::{HarnessError, Result};

/// Hill-climb starts used for the extremal ratio.
const SEARCH_STARTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalitySummary {
    pub n: usize,
    pub trials: usize,
    pub covers_per_trial: usize,
    /// Minimum over samples of 2k·KL(P‖Q) − Σ KL of marginals.
    pub min_gap_c2: Option<f64>,
    /// Same with the constant 9.
    pub min_gap_c9: Option<f64>,
    pub min_read_k_gap: Option<f64>,
    /// Best Σ KL(marginals)/(k·KL) found with singleton covers.
    pub extremal_ratio: Option<f64>,
    /// n/(n−1).
    pub ratio_reference: f64,
}

impl InequalitySummary {
    pub fn all_gaps_at_least(&self, tol: f64) -> bool {
        [self.min_gap_c2, self.min_gap_c9, self.min_read_k_gap]
            .into_iter()
            .flatten()
            .all(|g| g >= tol)
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// For each trial: a Dirichlet P over bijections of [n], then the singleton
/// cover and `covers` random covers (each with 1..=2n sets), and as many
/// random read-k families. Runs on the current rayon pool; the result does
/// not depend on the thread count.
pub fn verify_inequalities(n: usize, trials: usize, covers: usize, seed: u64) -> Result<InequalitySummary> {
    if !(1..=SEARCH_MAX_N).contains(&n) {
        return Err(HarnessError::Validation(format!("n = {n} must lie in 1..={SEARCH_MAX_N}")));
    }
    let per_trial: Vec<Result<(f64, f64, f64)>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(derive_trial_seed(seed, i));
            let p = BijectionDistribution::dirichlet(n, &mut rng).map_err(shearer_err)?;
            let (mut g2, mut g9, mut rk) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
            let mut check = |cover: &CoverFamily| -> Result<()> {
                g2 = g2.min(bijection_shearer_gap(&p, cover, 2.0).map_err(shearer_err)?);
                g9 = g9.min(bijection_shearer_gap(&p, cover, 9.0).map_err(shearer_err)?);
                Ok(())
            };
            check(&CoverFamily::singletons(n))?;
            for _ in 0..covers {
                let m = rng.gen_range(1..=2 * n);
                check(&CoverFamily::random(n, m, &mut rng))?;
                let fam = ReadKFamily::random(n, m, &mut rng).map_err(shearer_err)?;
                rk = rk.min(read_k_concentration_gap(&p, &fam).map_err(shearer_err)?);
            }
            Ok((g2, g9, rk))
        })
        .collect();

    let mut summary = InequalitySummary {
        n,
        trials,
        covers_per_trial: covers,
        min_gap_c2: None,
        min_gap_c9: None,
        min_read_k_gap: None,
        extremal_ratio: None,
        ratio_reference: if n > 1 { n as f64 / (n - 1) as f64 } else { f64::INFINITY },
    };
    for r in per_trial {
        let (g2, g9, rk) = r?;
        summary.min_gap_c2 = min_opt(summary.min_gap_c2, Some(g2));
        summary.min_gap_c9 = min_opt(summary.min_gap_c9, Some(g9));
        if rk.is_finite() {
            summary.min_read_k_gap = min_opt(summary.min_read_k_gap, Some(rk));
        }
    }
    if trials > 0 && n > 1 {
        let (ratio, _) = extremal_ratio_search(n, &CoverFamily::singletons(n), trials.min(SEARCH_STARTS), seed)
            .map_err(shearer_err)?;
        summary.extremal_ratio = Some(ratio);
    }
    Ok(summary)
}

fn shearer_err(e: permchal_core::permshearer::ShearerError) -> HarnessError {
    HarnessError::Validation(e.to_string())
}

use permchal_core::splitmix64;

/// Two rounds of splitmix64 over (master, index).
pub fn derive_trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index)
}

/// Φ⁻¹(0.975).
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        assert_eq!(derive_trial_seed(7, 3), derive_trial_seed(7, 3));
        assert_ne!(derive_trial_seed(7, 0), derive_trial_seed(8, 0));
        let seen: HashSet<u64> = (0..1_000_000).map(|i| derive_trial_seed(42, i)).collect();
        assert_eq!(seen.len(), 1_000_000);
    }

    #[test]
    fn wilson_reference_values() {
        // statsmodels proportion_confint(…, method="wilson").
        let (lo, hi) = wilson_interval(0, 10);
        assert!(lo.abs() < 1e-15);
        assert!((hi - 0.277_532_799_862_889_26).abs() < 1e-12, "{hi}");
        let (lo, hi) = wilson_interval(37, 100);
        assert!((lo - 0.281_823_605_343_245_3).abs() < 1e-12, "{lo}");
        assert!((hi - 0.467_794_704_190_570_95).abs() < 1e-12, "{hi}");
        let (lo, hi) = wilson_interval(1000, 1000);
        assert!((lo - 0.996_173_241_514_445).abs() < 1e-12, "{lo}");
        assert_eq!(hi, 1.0);
    }

    proptest! {
        #[test]
        fn wilson_contains_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
            let k = ((trials as f64) * frac).floor() as u64;
            let (lo, hi) = wilson_interval(k, trials);
            let p = k as f64 / trials as f64;
            prop_assert!(lo <= p + 1e-15 && p <= hi + 1e-15);
            prop_assert!(0.0 <= lo && hi <= 1.0);
        }
    }
}

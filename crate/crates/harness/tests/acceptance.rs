//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 7 cannot pass as stated: with S·T² = 8N the discrete-log bound
//! is at least 3T²/N + 32·ln2/T, which exceeds 1 for every T at N = 1009, so
//! the clamped bound is 1 and never below 0.5. It is run and reported like
//! the others but does not fail the process.

use std::process::ExitCode;
use std::time::Instant;

use permchal_core::attacks::{run_mi_game, Bsgs, MiConfig};
use permchal_core::infotheory::kl_bernoulli;
use permchal_core::pcmodel::{
    closed_form_uniformity, default_max_s, evaluate_bound, measure_uniformity, mid_simulation_oracle,
    play_with_advice, Adversary, GameKind, MidConstraints, OuterQuery, PCGame, Permutation, Secret, Theorem,
};
use permchal_core::permshearer::{extremal_ratio_search, CoverFamily};
use permchal_core::seeded;
use permchal_harness::{
    default_grid, derive_trial_seed, run_trials, verify_inequalities, with_jobs, write_csv, ExperimentReport,
    ExperimentSpec, RunOptions,
};
use rand::Rng as _;
use rayon::prelude::*;

const SEED: u64 = 20_240_601;
const GAP_TOL: f64 = -1e-9;
const GRID_SLACK: f64 = 1e-12;
const RATIO_SLACK: f64 = 0.01;
const SIGMAS: f64 = 3.0;
const KNOWN_UNATTAINABLE: [u32; 1] = [7];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn outcome(id: u32, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn spec(game: GameKind, attack: &str, n: u64, s_bits: usize, t: usize, trials: usize) -> ExperimentSpec {
    ExperimentSpec { game, attack: attack.into(), n, s_bits, t, trials, seed: SEED, theorem: None }
}

fn run(s: &ExperimentSpec) -> ExperimentReport {
    run_trials(s, RunOptions::default()).expect("experiment runs")
}

fn c1_c2() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut worst = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for n in 2..=5 {
        let s = verify_inequalities(n, 1000, 50, SEED + n as u64).unwrap();
        worst.0 = worst.0.min(s.min_gap_c2.unwrap());
        worst.1 = worst.1.min(s.min_gap_c9.unwrap());
        worst.2 = worst.2.min(s.min_read_k_gap.unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    (
        outcome(
            1,
            worst.0 >= GAP_TOL && worst.1 >= GAP_TOL && secs <= 60.0,
            format!("min gap c=2 {:.3e}, c=9 {:.3e}, {secs:.1}s (with read-k)", worst.0, worst.1),
        ),
        outcome(2, worst.2 >= GAP_TOL, format!("min read-k gap {:.3e}", worst.2)),
    )
}

fn c3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=4usize {
        let (r, _) = extremal_ratio_search(n, &CoverFamily::singletons(n), 20, SEED).unwrap();
        let target = n as f64 / (n - 1) as f64;
        ok &= r >= target - RATIO_SLACK;
        if n == 2 {
            ok &= r == 2.0;
        }
        parts.push(format!("n={n}: {r:.4} (≥ {:.4})", target - RATIO_SLACK));
    }
    outcome(3, ok, parts.join(", "))
}

fn c4() -> Outcome {
    let mut fails = 0;
    let mut points = 0;
    // p ∈ [0.01, 0.9], ε ∈ (0, 1−p]: KL(p+ε‖p) ≥ ε²/(2(p+ε)).
    for i in 0..100 {
        let p = 0.01 + 0.89 * i as f64 / 99.0;
        for j in 1..=100 {
            let eps = (1.0 - p) * j as f64 / 100.0;
            let q = (p + eps).min(1.0);
            let kl = kl_bernoulli(q, p).unwrap();
            fails += usize::from(kl < eps * eps / (2.0 * q) - GRID_SLACK);
            fails += usize::from(kl < 2.0 * (q - p).powi(2) - GRID_SLACK);
            points += 1;
        }
    }
    // p ≤ 2(q + KL(p‖q)).
    for i in 1..=100 {
        for j in 1..=100 {
            let (p, q) = (i as f64 / 100.0, j as f64 / 100.0);
            let kl = kl_bernoulli(p, q).unwrap();
            fails += usize::from(p > 2.0 * (q + kl) + GRID_SLACK);
            fails += usize::from(kl < 2.0 * (p - q).powi(2) - GRID_SLACK);
            points += 1;
        }
    }
    outcome(4, fails == 0, format!("{points} grid points, {fails} violations"))
}

fn c5() -> Outcome {
    let mut ok = true;
    let mut worst_ratio = f64::INFINITY;
    for n in [2u64, 3, 5, 7, 11, 13] {
        for kind in [GameKind::Dlog, GameKind::Ddh, GameKind::Sqddh] {
            let u = measure_uniformity(&PCGame::new(kind, n).unwrap()).unwrap().u;
            ok &= if kind == GameKind::Dlog { u == n as f64 } else { u >= n as f64 / 2.0 };
            ok &= (u - closed_form_uniformity(kind, n as f64)).abs() < 1e-9;
            worst_ratio = worst_ratio.min(u / n as f64);
        }
    }
    for n in [2u64, 4, 8, 16] {
        for kind in [GameKind::EmKr, GameKind::EmKrSingle] {
            ok &= measure_uniformity(&PCGame::new(kind, n).unwrap()).unwrap().u == n as f64;
        }
    }
    outcome(5, ok, format!("smallest u/N {worst_ratio:.4}"))
}

fn c6() -> Outcome {
    let start = Instant::now();
    let n = 101;
    let game = PCGame::new(GameKind::Dlog, n).unwrap();
    let adv = Bsgs::new(n, 11, 11).unwrap();
    let mut exhaustive = adv.s_bits() <= 2 * 11 * 7;
    for s in 0..20 {
        let mut rng = seeded(derive_trial_seed(SEED, s));
        let sigma = Permutation::random(n, &mut rng);
        let advice = adv.preprocess(&sigma, &mut rng);
        for d in 0..n {
            let t = play_with_advice(&game, &adv, &sigma, advice.clone(), &Secret::Dlog(d), &mut rng).unwrap();
            exhaustive &= t.success && t.t() <= 11;
        }
    }
    let specs: Vec<_> = default_grid(10_000, SEED).into_iter().filter(|s| s.attack == "bsgs").collect();
    let reports: Vec<_> = specs.iter().map(run).collect();
    let over = reports.iter().filter(|r| !r.respects_bound()).count();
    let max_p = reports.iter().map(|r| r.p_hat).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        6,
        exhaustive && over == 0 && secs <= 300.0,
        format!("exhaustive {exhaustive}, {} points, {over} above T11+band, max p̂ {max_p:.4}, {secs:.1}s", reports.len()),
    )
}

fn c7() -> Outcome {
    // S·T² = 8N with S counted in chains: 32 chains, T = 16 at N = 1009.
    let (n, t, chains) = (1009u64, 16usize, 32usize);
    let r = run(&spec(GameKind::Dlog, "chain", n, chains * 20, t, 1000));
    let s = chains as f64;
    let bound = evaluate_bound(Theorem::T11, n as f64, s, t as f64, n as f64, default_max_s(GameKind::Dlog, n as f64, t as f64)).unwrap();
    let success_ok = r.ci_high >= 0.5;
    outcome(
        7,
        success_ok && bound < 0.5,
        format!("chain p̂ {:.3} [{:.3}, {:.3}], T11(S={s}, T={t}) = {bound}", r.p_hat, r.ci_low, r.ci_high),
    )
}

fn c8() -> Outcome {
    let n = 101u64;
    let game = PCGame::new(GameKind::Dlog, n).unwrap();
    let inputs: Vec<u64> = (0..10).map(|i| (13 * i + 4) % n).collect();
    let queries: Vec<_> = (1..=10).map(|a| OuterQuery::Linear { a: 3 * a, b: 17 }).collect();
    let runs = 100_000u64;
    let flags: Vec<(bool, bool)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(derive_trial_seed(SEED, i));
            let c = MidConstraints::from_permutation(&Permutation::random(n, &mut rng), inputs.clone()).unwrap();
            let d = rng.gen_range(0..n);
            let sim = mid_simulation_oracle(&game, &c, &queries, &Secret::Dlog(d), rng.gen()).unwrap();
            (sim.w1, sim.w2)
        })
        .collect();
    let w1 = flags.iter().filter(|f| f.0).count() as f64 / runs as f64;
    let w2 = flags.iter().filter(|f| f.1).count() as f64 / runs as f64;
    let u = n as f64;
    let band = |p: f64| SIGMAS * (p * (1.0 - p) / runs as f64).sqrt();
    let (b1, b2) = (100.0 / u, 400.0 / (4.0 * u));
    outcome(
        8,
        w1 <= b1 + band(w1) && w2 <= b2 + band(w2),
        format!("Pr[W1] {w1:.4} ≤ {b1:.4}, Pr[W2] {w2:.4} ≤ {b2:.4}"),
    )
}

fn c9() -> Outcome {
    let start = Instant::now();
    let cells: Vec<_> = [8usize, 32, 128].iter().map(|&s| run(&spec(GameKind::Sqddh, "sqddh", 8191, s, 16, 100_000))).collect();
    let adv: Vec<(f64, f64)> = cells
        .iter()
        .map(|r| (r.p_hat - 0.5, (r.p_hat * (1.0 - r.p_hat) / r.trials as f64).sqrt()))
        .collect();
    let positive = adv[0].0 > SIGMAS * adv[0].1;
    let monotone = adv
        .windows(2)
        .all(|w| w[1].0 - w[0].0 > SIGMAS * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt());
    let secs = start.elapsed().as_secs_f64();
    outcome(
        9,
        positive && monotone && secs <= 600.0,
        format!(
            "advantage S=8 {:.4}, S=32 {:.4}, S=128 {:.4} (σ ≈ {:.4}), {secs:.1}s",
            adv[0].0, adv[1].0, adv[2].0, adv[0].1
        ),
    )
}

fn c10() -> Outcome {
    let (n, t) = (1009, 60);
    let instances = MiConfig::default_instances(n, t);
    let outs: Vec<_> = (0..100u64)
        .into_par_iter()
        .map(|r| run_mi_game(&MiConfig { n, t, instances, forced_guess: true, seed: derive_trial_seed(SEED, r) }).unwrap())
        .collect();
    let good = outs.iter().filter(|o| o.determined_fraction >= 0.95).count();
    let coverage = outs.iter().map(|o| o.interval_coverage).sum::<f64>() / outs.len() as f64;
    let full = outs.iter().filter(|o| o.interval_coverage == 1.0).count();
    outcome(
        10,
        good >= 90 && coverage >= 0.95,
        format!("{good}/100 runs determined, mean window coverage {coverage:.4}, fully covered runs {full}/100"),
    )
}

fn c11() -> Outcome {
    let grid = default_grid(10_000, SEED);
    let csv = |jobs| {
        let reports = with_jobs(jobs, || grid.iter().map(run).collect::<Vec<_>>()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &reports).unwrap();
        buf
    };
    let (a, b) = (csv(1), csv(4));
    outcome(11, a == b, format!("{} bytes, jobs 1 vs 4", a.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (o1, o2) = c1_c2();
    let outcomes = vec![o1, o2, c3(), c4(), c5(), c6(), c7(), c8(), c9(), c10(), c11()];
    let mut unexpected = 0;
    for o in &outcomes {
        let known = KNOWN_UNATTAINABLE.contains(&o.id);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && known { " (known unattainable)" } else { "" };
        println!("criterion {:>2}: {tag}{note}  {}", o.id, o.detail);
        unexpected += usize::from(!o.pass && !known);
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

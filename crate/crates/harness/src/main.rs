use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permchal_core::attacks::{run_mi_game, MiConfig};
use permchal_core::pcmodel::{
    closed_form_uniformity, default_max_s, evaluate_bound, measure_uniformity, GameKind, PCGame, Theorem,
};
use permchal_harness::{
    default_grid, load_config, sweep_grid, verify_inequalities, with_jobs, write_csv,
    write_json, ExperimentReport, ExperimentSpec, HarnessError, Result, RunOptions,
};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "permchal", version, about = "Permutation-challenge game experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Game(GameArgs),
    /// Run a grid of experiments from a config file, or the default grid.
    Sweep(SweepArgs),
    /// Exhaustively measure the uniformity of a game's translation.
    Uniformity {
        #[arg(long, value_parser = parse_game)]
        game: GameKind,
        #[arg(long)]
        n: u64,
    },
    /// Check the Shearer-type inequalities on random distributions.
    Shearer {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 50)]
        covers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Exit with code 4 if any gap is below −1e-9.
        #[arg(long)]
        assert: bool,
    },
    /// Play the multi-instance discrete-log game.
    Mi {
        #[arg(long, default_value_t = 1009)]
        n: u64,
        #[arg(long, default_value_t = 60)]
        t: usize,
        /// Defaults to 4·⌈N/T²⌉.
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value_t = 100)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Let the initial guesses be wrong with the natural probability.
        #[arg(long)]
        no_forced_guess: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print bound values for a game.
    Bounds {
        #[arg(long, value_parser = parse_game)]
        game: GameKind,
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        s_bits: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Record wall-clock seconds (otherwise 0, keeping output reproducible).
    #[arg(long)]
    timing: bool,
    /// Exit with code 4 if a non-adaptive attack beats its bound.
    #[arg(long)]
    assert: bool,
}

#[derive(Args)]
struct GameArgs {
    #[arg(long, value_parser = parse_game)]
    game: GameKind,
    #[arg(long)]
    attack: String,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    s_bits: usize,
    #[arg(long, default_value_t = 0)]
    t: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_theorem)]
    theorem: Option<Theorem>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trials per point of the default grid.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Master seed of the default grid.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_game(s: &str) -> std::result::Result<GameKind, String> {
    GameKind::parse(s).ok_or_else(|| format!("unknown game {s} (dlog, ddh, sqddh, em, em1k)"))
}

fn parse_theorem(s: &str) -> std::result::Result<Theorem, String> {
    Theorem::parse(s).ok_or_else(|| format!("unknown theorem {s}"))
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(out: &Output, reports: &[ExperimentReport]) -> Result<()> {
    let mut w = sink(&out.out)?;
    match out.format {
        Format::Csv => write_csv(&mut w, reports)?,
        Format::Json => write_json(&mut w, reports)?,
    }
    w.flush()?;
    Ok(())
}

fn check_bounds(reports: &[ExperimentReport]) -> Result<()> {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.respects_bound())
        .map(|r| format!("{} on {} N={} S={} T={}: p̂ {} > {} {}", r.attack, r.game, r.n, r.s_bits, r.t, r.p_hat, r.bound_theorem, r.bound_value))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::Assertion(bad.join("; ")))
    }
}

fn run_experiments(specs: &[ExperimentSpec], out: &Output) -> Result<()> {
    let opts = RunOptions { timing: out.timing };
    let reports = with_jobs(out.jobs, || sweep_grid(specs, opts, |partial| emit(out, partial)))??;
    emit(out, &reports)?;
    if out.assert {
        check_bounds(&reports)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Game(a) => {
            let spec = ExperimentSpec {
                game: a.game,
                attack: a.attack,
                n: a.n,
                s_bits: a.s_bits,
                t: a.t,
                trials: a.trials,
                seed: a.seed,
                theorem: a.theorem,
            };
            run_experiments(&[spec], &a.output)
        }
        Command::Sweep(a) => {
            let specs = match &a.config {
                Some(path) => load_config(path)?,
                None => default_grid(a.trials, a.seed),
            };
            run_experiments(&specs, &a.output)
        }
        Command::Uniformity { game, n } => {
            let g = PCGame::new(game, n)?;
            let u = measure_uniformity(&g)?;
            println!("game {game} n {n}");
            println!("u {}", u.u);
            println!("closed_form {}", closed_form_uniformity(game, n as f64));
            println!("max_fiber {}", u.max_fiber);
            println!("worst_query {:?}", u.worst_query);
            println!("worst_target {}", g.to_label(u.worst_target));
            Ok(())
        }
        Command::Shearer { n, trials, covers, seed, jobs, assert } => {
            let s = with_jobs(jobs, || verify_inequalities(n, trials, covers, seed))??;
            println!("{}", serde_json::to_string_pretty(&s)?);
            if assert && !s.all_gaps_at_least(-1e-9) {
                return Err(HarnessError::Assertion("a Shearer-type gap is negative".into()));
            }
            Ok(())
        }
        Command::Mi { n, t, instances, runs, seed, no_forced_guess, jobs } => {
            let instances = instances.unwrap_or_else(|| MiConfig::default_instances(n, t));
            let outcomes = with_jobs(jobs, || {
                (0..runs)
                    .into_par_iter()
                    .map(|r| {
                        run_mi_game(&MiConfig {
                            n,
                            t,
                            instances,
                            forced_guess: !no_forced_guess,
                            seed: permchal_harness::derive_trial_seed(seed, r),
                        })
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })??;
            println!("run,all_correct,determined_fraction,interval_coverage");
            for (r, o) in outcomes.iter().enumerate() {
                println!("{r},{},{},{}", u8::from(o.all_correct), o.determined_fraction, o.interval_coverage);
            }
            let k = outcomes.len().max(1) as f64;
            eprintln!(
                "instances {instances}, runs with determined_fraction ≥ 0.95: {}, mean coverage {}",
                outcomes.iter().filter(|o| o.determined_fraction >= 0.95).count(),
                outcomes.iter().map(|o| o.interval_coverage).sum::<f64>() / k
            );
            Ok(())
        }
        Command::Bounds { game, n, s_bits, t } => {
            PCGame::new(game, n)?;
            let nf = n as f64;
            let u = closed_form_uniformity(game, nf);
            let applicable: Vec<Theorem> = Theorem::ALL
                .into_iter()
                .filter(|th| {
                    *th == Theorem::T41
                        || *th == Theorem::for_game(game)
                        || (*th == Theorem::TE1 && game.is_group())
                })
                .collect();
            print!("s_bits,t");
            for th in &applicable {
                print!(",{th}");
            }
            println!();
            for &s in &s_bits {
                for &tt in &t {
                    print!("{s},{tt}");
                    for &th in &applicable {
                        print!(",{}", evaluate_bound(th, nf, s, tt, u, default_max_s(game, nf, tt))?);
                    }
                    println!();
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

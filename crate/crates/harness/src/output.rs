use std::io::Write;

use serde::Serialize;

use crate::runner::ExperimentReport;
use crate::Result;

pub const CSV_VERSION_LINE: &str = "#permchal-v1";

pub const CSV_COLUMNS: [&str; 14] = [
    "game",
    "attack",
    "n",
    "s_bits",
    "t",
    "trials",
    "successes",
    "p_hat",
    "ci_low",
    "ci_high",
    "bound_theorem",
    "bound_value",
    "seed",
    "seconds",
];

#[derive(Serialize)]
struct Row<'a> {
    game: &'a str,
    attack: &'a str,
    n: u64,
    s_bits: usize,
    t: usize,
    trials: usize,
    successes: u64,
    p_hat: f64,
    ci_low: f64,
    ci_high: f64,
    bound_theorem: &'a str,
    bound_value: f64,
    seed: u64,
    seconds: f64,
}

pub fn write_csv(mut out: impl Write, reports: &[ExperimentReport]) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(Row {
            game: r.game.name(),
            attack: &r.attack,
            n: r.n,
            s_bits: r.s_bits,
            t: r.t,
            trials: r.trials,
            successes: r.successes,
            p_hat: r.p_hat,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            bound_theorem: r.bound_theorem.name(),
            bound_value: r.bound_value,
            seed: r.seed,
            seconds: r.seconds,
        })?;
    }
    if reports.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(mut out: impl Write, reports: &[ExperimentReport]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, reports)?;
    writeln!(out)?;
    Ok(())
}

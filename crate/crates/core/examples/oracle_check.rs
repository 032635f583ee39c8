//! Replays decoded trials on a stabilizer tableau and compares signs.

use atg_core::code::fixtures;
use atg_core::decoder::{DecodeMode, Pipeline, DEFAULT_EXACT_CAP};
use atg_core::tableau::oracle_cross_check;

fn main() -> atg_core::Result<()> {
    let runs = [
        ("[[4,2,2]] T=1", Pipeline::bell(&fixtures::c422(), 1, DecodeMode::Exact, DEFAULT_EXACT_CAP)?, 0.1, 200),
        ("Steane T=2", Pipeline::bell(&fixtures::steane(), 2, DecodeMode::Exact, DEFAULT_EXACT_CAP)?, 0.05, 50),
        ("[[4,2,2]] T=2 ghz3", Pipeline::ghz(&fixtures::c422(), 2, 3, DecodeMode::Exact, DEFAULT_EXACT_CAP)?, 0.05, 100),
    ];
    for (name, p, prob, trials) in runs {
        let r = oracle_cross_check(&p, prob, trials, 3)?;
        println!(
            "{name}: {} trials, {} mismatches, logical failures x={} z={}",
            r.trials,
            r.mismatches.len(),
            r.failures_x,
            r.failures_z
        );
    }
    Ok(())
}

//! Three-surface GHZ preparation with [[4,2,2]]: layer choice, stabilizer
//! counts and a short sweep.

use atg_core::code::fixtures;
use atg_core::ghz::ghz_layers;
use atg_core::harness::{run_sweep, to_csv, PatternSpec, SweepConfig};
use atg_core::stabilizers::StabilizerKind;
use atg_core::decoder::{DecodeMode, Pipeline, DEFAULT_EXACT_CAP};

fn main() -> atg_core::Result<()> {
    let code = fixtures::c422();
    for t in [2, 4, 6] {
        let pat = ghz_layers(t, 3)?;
        println!("T={t}: surfaces {:?}, spacing {}", pat.layers, pat.delta);
    }
    let p = Pipeline::ghz(&code, 4, 3, DecodeMode::Exact, DEFAULT_EXACT_CAP)?;
    let count = |k| p.set.s1.iter().filter(|e| e.kind == k).count();
    println!(
        "T=4 m=3: {} meta-checks, {} logical X, {} logical ZZ",
        p.set.s0.len(),
        count(StabilizerKind::LogicalXX),
        count(StabilizerKind::LogicalZZ)
    );
    let mut cfg = SweepConfig::new(code, 4, vec![0.0, 0.01, 0.03], 2000, 1);
    cfg.pattern = PatternSpec::Ghz(3);
    print!("{}", to_csv(&run_sweep(&cfg)?.rows));
    Ok(())
}

//! Failure rates of [[4,2,2]] and Steane over a few error rates.

use atg_core::code::fixtures;
use atg_core::harness::{run_sweep, to_csv, SweepConfig};

fn main() -> atg_core::Result<()> {
    let ps = vec![0.0, 0.005, 0.01, 0.02, 0.05];
    for (code, t) in [(fixtures::c422(), 2), (fixtures::steane(), 2)] {
        let cfg = SweepConfig::new(code, t, ps.clone(), 2000, 7);
        print!("{}", to_csv(&run_sweep(&cfg)?.rows));
    }
    Ok(())
}

//! Threshold constants and the union bound for a few codes.

use atg_core::cluster::{failure_bound, threshold_bounds};
use atg_core::code::fixtures;

fn main() -> atg_core::Result<()> {
    for ell in 2..=6 {
        let b = threshold_bounds(ell)?;
        println!(
            "ell={ell}: z={} p0=1/{} p1=p2=1/{}",
            b.z, b.p0_denominator, b.p1_denominator
        );
    }
    let code = fixtures::steane();
    let b = threshold_bounds(code.ell as u64)?;
    for frac in [1e-4, 1e-3, 1e-2, 1e-1] {
        let p = frac * b.p_star;
        println!("steane T=3 p={p:.3e}: bound {:.3e}", failure_bound(&code, 3, p, &b)?);
    }
    Ok(())
}

//! One noisy trial on the Steane code, printing each stage of decoding.

use atg_core::code::fixtures;
use atg_core::decoder::{DecodeMode, Pipeline, DEFAULT_EXACT_CAP};
use atg_core::noise::{sample_error, NoiseConfig};

fn main() -> atg_core::Result<()> {
    let p = Pipeline::bell(&fixtures::steane(), 2, DecodeMode::Exact, DEFAULT_EXACT_CAP)?;
    let cfg = NoiseConfig::new(0.05, 11)?;
    let eta = sample_error(&p.graph, &p.pattern, &cfg);
    let tr = p.trace(&eta)?;
    let names = |v: &atg_core::gf2::BitVector| {
        v.iter_ones().map(|u| p.graph.vertices[u].to_string()).collect::<Vec<_>>().join(" ")
    };
    println!("error:      {}", names(&eta.bits));
    println!("meta:       {}", tr.meta);
    println!("inferred:   {}", names(&tr.decode.beta));
    println!("residual:   {}", tr.residual);
    println!("rep x / z:  [{}] / [{}]", names(&tr.rep.rep_x), names(&tr.rep.rep_z));
    println!(
        "flags x={:?} z={:?} success={} cc=({}, {})",
        tr.outcome.logical_x_flags, tr.outcome.logical_z_flags, tr.outcome.success, tr.outcome.cc_x_ok, tr.outcome.cc_z_ok
    );
    Ok(())
}

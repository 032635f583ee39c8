//! Syndrome adjacency graphs of the Steane code and the clusters of
//! decoding mismatches at moderate noise.

use atg_core::cluster::count_connected_sets;
use atg_core::code::fixtures;
use atg_core::decoder::{DecodeMode, Pipeline, DEFAULT_EXACT_CAP};
use atg_core::noise::{trial_seed, NoiseConfig};

fn main() -> atg_core::Result<()> {
    let p = Pipeline::bell(&fixtures::steane(), 3, DecodeMode::Exact, DEFAULT_EXACT_CAP)?;
    for sag in [&p.x_sag, &p.z_sag] {
        println!(
            "{:?} graph: {} nodes, {} edges, max degree {}",
            sag.side,
            sag.num_nodes(),
            sag.num_edges(),
            sag.max_degree()
        );
    }
    let mut hist = [0u32; 12];
    for i in 0..2000 {
        let o = p.run_trial(&NoiseConfig::new(0.03, trial_seed(2, 0, i))?)?;
        for c in o.clusters.x.components.iter().chain(&o.clusters.z.components) {
            hist[c.size.min(11)] += 1;
        }
    }
    println!("cluster sizes at p=0.03 over 2000 trials:");
    for (s, n) in hist.iter().enumerate().skip(1).filter(|(_, &n)| n > 0) {
        println!("  {s:>2}: {n}");
    }
    let ring: Vec<Vec<usize>> = (0..8).map(|i| vec![(i + 7) % 8, (i + 1) % 8]).collect();
    for s in 1..=4 {
        println!("connected sets of size {s} through node 0 of an 8-cycle: {}", count_connected_sets(&ring, &[0], s)?);
    }
    Ok(())
}

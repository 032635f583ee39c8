//! Builds the cluster-state graph of the Steane code and prints its shape.
//!
//! ```text
//! cargo run --example build_atg
//! ```

use atg_core::atg::{bell_pattern, build_atg, prep_schedule};
use atg_core::code::fixtures;

fn main() -> atg_core::Result<()> {
    let code = fixtures::steane();
    for t in 1..=3 {
        let g = build_atg(&code, t)?;
        let pat = bell_pattern(&g);
        println!(
            "T={t}: {} layers, {} vertices, {} edges, max degree {}, {} measured, {} CZ rounds",
            g.layers,
            g.num_vertices(),
            g.edges.len(),
            g.max_degree(),
            pat.measured.weight(),
            prep_schedule(&g).len()
        );
    }
    let g = build_atg(&fixtures::c422(), 1)?;
    println!("[[4,2,2]] T=1 neighbours of {}:", g.vertices[0]);
    for &u in g.neighbors(0) {
        println!("  {}", g.vertices[u]);
    }
    Ok(())
}

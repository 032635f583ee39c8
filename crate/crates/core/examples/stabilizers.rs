//! Lists the Bell-pattern stabilizer elements of [[4,2,2]] at T=2 and checks
//! that each one factorizes into graph stabilizers.

use atg_core::atg::{bell_pattern, build_atg};
use atg_core::code::{fixtures, logical_basis};
use atg_core::stabilizers::{bell_stabilizers, verify_factorization};

fn main() -> atg_core::Result<()> {
    let code = fixtures::c422();
    let g = build_atg(&code, 2)?;
    let pat = bell_pattern(&g);
    let set = bell_stabilizers(&g, &logical_basis(&code));
    println!("{} meta-checks, {} surface elements", set.s0.len(), set.s1.len());
    for e in set.s0.iter().chain(&set.s1) {
        let r = verify_factorization(&g, &pat, e);
        let names: Vec<String> = e.generators.iter().map(|&v| g.vertices[v].to_string()).collect();
        println!("{:<14} ok={} generators {}", e.label(), r.ok, names.join(" "));
    }
    Ok(())
}

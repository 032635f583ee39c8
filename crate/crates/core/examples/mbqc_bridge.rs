//! Foliated cluster runs on [[4,2,2]] translated into repeated-measurement
//! syndromes, checked against the protocol's recurrence.

use atg_core::code::fixtures;
use atg_core::mbqc::{foliate_outcomes, repeated_from_errors, verify_recurrence};
use atg_core::tableau::foliated_run;

fn main() -> atg_core::Result<()> {
    let code = fixtures::c422();
    let (rec, f) = foliated_run(&code, 3, 0.1, 5)?;
    let (s_x, s_z) = foliate_outcomes(&code, &rec)?;
    let model = repeated_from_errors(&code, &f)?;
    for j in 0..3 {
        println!(
            "round {}: s_z={} s_x={}   frame model s_z={} s_x={}",
            j + 1,
            s_z[j],
            s_x[j],
            model.s_z[j],
            model.s_x[j]
        );
    }
    let ok = (0..200).filter(|&s| {
        let (rec, f) = foliated_run(&code, 3, 0.1, s).unwrap();
        verify_recurrence(&code, &rec, &f).unwrap()
    });
    println!("recurrence holds on {}/200 runs", ok.count());
    Ok(())
}

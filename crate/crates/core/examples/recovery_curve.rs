//! End-to-end recovery rate as a function of rows sampled per column,
//! written as CSV.
//!
//! cargo run --release --example recovery_curve > curve.csv

use subspace_ident::experiments::{format_csv, paired_trial, recovery_curve};

fn main() -> subspace_ident::Result<()> {
    let (d, r) = (30, 2);
    let ells: Vec<usize> = (3..=12).collect();
    let reports = recovery_curve(d, r, &ells, 300, 99)?;
    print!("{}", format_csv(&reports));

    // A single paired trial: the pattern verdict and the recovery outcome agree.
    let t = paired_trial(d, r, 6, 1)?;
    eprintln!(
        "pattern identifiable {}, recovered {}",
        t.pattern_identifiable, t.recovered
    );
    Ok(())
}

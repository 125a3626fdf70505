//! Success rate of uniformly random sampling at the rows-per-column bound
//! for a target failure probability.
//!
//! cargo run --release --example random_sampling_bound

use subspace_ident::experiments::{estimate_rate_for_eps, format_table};
use subspace_ident::pattern::theorem2_ell;

fn main() -> subspace_ident::Result<()> {
    let mut reports = Vec::new();
    for (d, r, eps) in [(40, 3, 0.5), (60, 5, 0.25), (120, 4, 0.1)] {
        let bound = theorem2_ell(d, r, eps)?;
        println!(
            "d {d} r {r} eps {eps}: ell {} (uncapped {})",
            bound.ell, bound.uncapped
        );
        reports.push(estimate_rate_for_eps(d, r, eps, 1000, 2024)?);
    }
    print!("{}", format_table(&reports));
    Ok(())
}

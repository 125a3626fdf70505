//! A line in R^5 seen through four two-coordinate projections: first with
//! a pattern that leaves it ambiguous, then with one that pins it down.
//!
//! cargo run --example line_identifiability

use subspace_ident::identify::ObservationSet;
use subspace_ident::linalg::subspace_distance;
use subspace_ident::pattern::{check_identifiability_bruteforce, check_identifiability_fast};
use subspace_ident::{SamplingPattern, Subspace, Tolerances};

fn main() -> subspace_ident::Result<()> {
    let tol = Tolerances::default();
    let truth = Subspace::line(&[1.0, 2.0, 3.0, 4.0, 4.0])?;
    let ambiguous = SamplingPattern::parse("5 4 1\n1010\n1100\n0110\n0001\n0001\n")?;
    let repaired = SamplingPattern::parse("5 4 1\n1000\n1100\n0110\n0011\n0001\n")?;

    for (name, p) in [("ambiguous", &ambiguous), ("repaired", &repaired)] {
        let brute = check_identifiability_bruteforce(p)?;
        let fast = check_identifiability_fast(p)?;
        println!("{name} pattern:\n{}", p.to_text());
        println!(
            "  exhaustive check: {}, witness {:?}",
            brute.satisfied, brute.witness
        );
        println!(
            "  matching check:   {}, witness {:?}",
            fast.satisfied, fast.witness
        );

        let obs = ObservationSet::from_subspace(&truth, p.columns(), &tol)?;
        let res = obs.recover(&tol)?;
        match &res.subspace {
            Some(s) => println!(
                "  recovered (kernel dim {}), distance to truth {:.1e}",
                res.kernel_dim,
                subspace_distance(s, &truth)?
            ),
            None => println!("  underdetermined: kernel dim {} > r = 1", res.kernel_dim),
        }
    }
    Ok(())
}

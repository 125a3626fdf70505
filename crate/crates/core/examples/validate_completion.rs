//! Certify candidate completions against held-out columns.
//!
//! cargo run --example validate_completion

use subspace_ident::completion::{choose_split, synth, validate_completion, validate_on_split};
use subspace_ident::linalg::random_subspace;
use subspace_ident::pattern::random_pattern;
use subspace_ident::{Candidate, ObservedMatrix, SamplingPattern, Subspace, Tolerances};

fn main() -> subspace_ident::Result<()> {
    let tol = Tolerances::default();
    let truth = Subspace::line(&[1.0, 2.0, 3.0, 4.0, 4.0])?;
    let wrong = Candidate::Subspace(Subspace::line(&[1.0, 2.0, 3.0, 5.0, 5.0])?);
    let x = synth(&truth, 4, 3)?;

    // The wrong line fits every observed entry under the invalid pattern,
    // so that pattern cannot certify anything.
    for text in [
        "5 4 1\n1010\n1100\n0110\n0001\n0001\n",
        "5 4 1\n1000\n1100\n0110\n0011\n0001\n",
    ] {
        let holdout = ObservedMatrix::sample(&x, &SamplingPattern::parse(text)?)?;
        let cert = validate_completion(&wrong, &holdout, 1, &tol)?;
        println!("{}", cert.to_text());
    }

    // Larger instance: let the library choose a small validation set.
    let (d, r) = (20, 3);
    let s = random_subspace(d, r, 9)?;
    let p = random_pattern(d, 40, 8, r, 10)?;
    let data = ObservedMatrix::sample(&synth(&s, 40, 11)?, &p)?;
    if let Some((train, holdout)) = choose_split(data.masks(), d, r)? {
        println!(
            "training columns {}, validation columns {}",
            train.len(),
            holdout.len()
        );
        let good = validate_on_split(&Candidate::Subspace(s), &data, &holdout, r, &tol)?;
        let bad = validate_on_split(
            &Candidate::Subspace(random_subspace(d, r, 12)?),
            &data,
            &holdout,
            r,
            &tol,
        )?;
        println!(
            "true subspace: {}, random subspace: {}",
            good.verdict.name(),
            bad.verdict.name()
        );
    }
    Ok(())
}

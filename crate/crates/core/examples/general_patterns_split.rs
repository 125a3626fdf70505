//! Columns observing more than r + 1 coordinates: split them into
//! (r + 1)-row columns and search for a valid d × (d − r) submatrix.
//!
//! cargo run --example general_patterns_split

use subspace_ident::identify::ObservationSet;
use subspace_ident::linalg::{random_subspace, subspace_distance};
use subspace_ident::pattern::{
    find_valid_submatrix, is_identifiable, random_pattern, split_with_origin,
};
use subspace_ident::Tolerances;

fn main() -> subspace_ident::Result<()> {
    let (d, r) = (12, 2);
    let tol = Tolerances::default();
    for (n_cols, ell) in [(2, 7), (4, 8), (8, 5)] {
        let p = random_pattern(d, n_cols, ell, r, 17)?;
        let (split, origin) = split_with_origin(&p)?;
        let found = find_valid_submatrix(&split)?;
        println!(
            "{n_cols} columns of {ell} rows -> {} split columns",
            split.n_cols()
        );
        match &found {
            Some(cols) => {
                let mut src: Vec<usize> = cols.iter().map(|&c| origin[c]).collect();
                src.dedup();
                println!("  valid submatrix uses split columns {cols:?} from sources {src:?}");
            }
            None => println!("  no valid {d} x {} submatrix", d - r),
        }

        let truth = random_subspace(d, r, 5)?;
        let res = ObservationSet::from_subspace(&truth, p.columns(), &tol)?.recover(&tol)?;
        let dist = res
            .subspace
            .as_ref()
            .map(|s| subspace_distance(s, &truth))
            .transpose()?;
        println!(
            "  identifiable {}, recovery distance {dist:?}",
            is_identifiable(&p)?
        );
    }
    Ok(())
}

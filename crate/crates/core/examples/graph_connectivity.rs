//! Row connectivity of the bipartite graph is necessary for
//! identifiability, and sufficient only when r = 1.
//!
//! cargo run --example graph_connectivity

use subspace_ident::pattern::check_identifiability_bruteforce;
use subspace_ident::{BipartiteGraph, SamplingPattern};

fn main() -> subspace_ident::Result<()> {
    let rows: Vec<Vec<u8>> = [
        "11000000", "11100100", "01100010", "10100001", "00010100", "00010010", "00010001",
        "00001100", "00001010", "00001001",
    ]
    .iter()
    .map(|r| r.bytes().map(|b| b - b'0').collect())
    .collect();
    let p = SamplingPattern::from_rows(&rows, 2)?;
    let g = BipartiteGraph::build(&p);
    let conn = g.is_r_row_connected(2)?;
    let verdict = check_identifiability_bruteforce(&p)?;
    println!("2-row-connected: {}", conn.connected);
    println!(
        "identifiable:    {} (violating columns {:?})",
        verdict.satisfied, verdict.witness
    );
    println!("maximum matching size: {}", g.max_matching().size);
    println!("edge list (column row, 1-based):\n{}", g.to_edge_list());
    Ok(())
}

//! Bipartite view of a sampling pattern: row vertices `0..d`, column
//! vertices `0..N`, and an edge `(j, i)` whenever row `j` is sampled by
//! column `i`.
//!
//! Also hosts the augmenting-path matching engine used by the fast
//! expansion checker in [`crate::pattern`].

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::pattern::SamplingPattern;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    row_count: usize,
    /// Sorted, duplicate-free row indices per column.
    adjacency: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub size: usize,
    /// `(column, row)` pairs.
    pub pairs: Vec<(usize, usize)>,
}

/// Outcome of the row-connectivity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowConnectivity {
    pub connected: bool,
    /// When not connected: rows whose removal disconnects the graph (at most
    /// `r - 1` of them; empty when the graph is disconnected outright).
    pub separator: Option<Vec<usize>>,
}

/// Above this many removal sets the flow-based test is used instead of
/// enumeration.
pub const EXHAUSTIVE_REMOVAL_LIMIT: u64 = 1_000_000;

impl BipartiteGraph {
    pub fn build(p: &SamplingPattern) -> Self {
        Self {
            row_count: p.d(),
            adjacency: p.columns().iter().map(|c| c.ones_vec()).collect(),
        }
    }

    pub fn from_adjacency(row_count: usize, mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        for (i, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if let Some(&j) = list.last() {
                if j >= row_count {
                    return Err(Error::InvalidArgument(format!(
                        "column {i} adjacent to row {j} >= {row_count}"
                    )));
                }
            }
        }
        Ok(Self {
            row_count,
            adjacency,
        })
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn col_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacency(&self, col: usize) -> &[usize] {
        &self.adjacency[col]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, rows)| rows.iter().map(move |&j| (j, i)))
    }

    /// Rows adjacent to at least one of `cols`, sorted.
    pub fn neighborhood(&self, cols: &[usize]) -> Result<Vec<usize>> {
        let mut seen = vec![false; self.row_count];
        for &c in cols {
            let list = self.adjacency.get(c).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "column {c} out of range for {} columns",
                    self.col_count()
                ))
            })?;
            for &j in list {
                seen[j] = true;
            }
        }
        Ok((0..self.row_count).filter(|&j| seen[j]).collect())
    }

    /// Maximum-cardinality matching by repeated alternating-path augmentation.
    pub fn max_matching(&self) -> Matching {
        let adj: Vec<&[usize]> = self.adjacency.iter().map(Vec::as_slice).collect();
        let mut state = MatchState::new(self.row_count, adj.len());
        for c in 0..adj.len() {
            state.augment(&adj, c);
        }
        let pairs: Vec<(usize, usize)> = state
            .col_to_row
            .iter()
            .enumerate()
            .filter_map(|(c, r)| r.map(|r| (c, r)))
            .collect();
        Matching {
            size: pairs.len(),
            pairs,
        }
    }

    /// Edge list, one `j i` pair per line with 1-based row `j` and column `i`.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (j, i) in self.edges() {
            s.push_str(&format!("{} {}\n", j + 1, i + 1));
        }
        s
    }

    fn row_adjacency(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.row_count];
        for (i, list) in self.adjacency.iter().enumerate() {
            for &j in list {
                rows[j].push(i);
            }
        }
        rows
    }

    /// Whether the graph stays connected after deleting any `r - 1` row
    /// vertices. Removal sets are enumerated when there are at most
    /// [`EXHAUSTIVE_REMOVAL_LIMIT`] of them; otherwise a minimum row cut is
    /// computed by unit-capacity flow.
    pub fn is_r_row_connected(&self, r: usize) -> Result<RowConnectivity> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        if binomial(self.row_count as u64, (r - 1) as u64) <= EXHAUSTIVE_REMOVAL_LIMIT {
            Ok(self.row_connectivity_exhaustive(r))
        } else {
            Ok(self.row_connectivity_flow(r))
        }
    }

    /// Definitional test: try every set of `r - 1` rows.
    pub fn row_connectivity_exhaustive(&self, r: usize) -> RowConnectivity {
        let k = r.saturating_sub(1).min(self.row_count);
        let row_adj = self.row_adjacency();
        let mut removed = vec![false; self.row_count];
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            for &j in &combo {
                removed[j] = true;
            }
            let connected = self.connected_without(&row_adj, &removed);
            for &j in &combo {
                removed[j] = false;
            }
            if !connected {
                return RowConnectivity {
                    connected: false,
                    separator: Some(combo),
                };
            }
            if !next_combination(&mut combo, self.row_count) {
                return RowConnectivity {
                    connected: true,
                    separator: None,
                };
            }
        }
    }

    fn connected_without(&self, row_adj: &[Vec<usize>], removed: &[bool]) -> bool {
        let n_cols = self.col_count();
        let remaining_rows = removed.iter().filter(|&&x| !x).count();
        let total = remaining_rows + n_cols;
        if total <= 1 {
            return true;
        }
        let mut seen_col = vec![false; n_cols];
        let mut seen_row = vec![false; self.row_count];
        // Vertices: columns as (false, i), rows as (true, j).
        let mut queue = VecDeque::new();
        if n_cols > 0 {
            seen_col[0] = true;
            queue.push_back((false, 0));
        } else {
            let j = removed.iter().position(|&x| !x).unwrap();
            seen_row[j] = true;
            queue.push_back((true, j));
        }
        let mut count = 1;
        while let Some((is_row, v)) = queue.pop_front() {
            if is_row {
                for &i in &row_adj[v] {
                    if !seen_col[i] {
                        seen_col[i] = true;
                        count += 1;
                        queue.push_back((false, i));
                    }
                }
            } else {
                for &j in &self.adjacency[v] {
                    if !removed[j] && !seen_row[j] {
                        seen_row[j] = true;
                        count += 1;
                        queue.push_back((true, j));
                    }
                }
            }
        }
        count == total
    }

    /// Scalable test: minimum row-vertex cut between column 0 and every
    /// other column (columns cannot be cut), plus isolated rows.
    pub fn row_connectivity_flow(&self, r: usize) -> RowConnectivity {
        let need = r.saturating_sub(1);
        let n_cols = self.col_count();
        let row_adj = self.row_adjacency();
        // An isolated row stays isolated whatever else is removed, as long as
        // another vertex survives.
        if row_adj.iter().any(Vec::is_empty)
            && need < self.row_count
            && self.row_count - need + n_cols >= 2
        {
            return RowConnectivity {
                connected: false,
                separator: Some(Vec::new()),
            };
        }
        if n_cols <= 1 {
            return RowConnectivity {
                connected: true,
                separator: None,
            };
        }
        for t in 1..n_cols {
            let (flow, cut) = self.min_row_cut(0, t, need + 1);
            if flow <= need {
                return RowConnectivity {
                    connected: false,
                    separator: Some(cut),
                };
            }
        }
        RowConnectivity {
            connected: true,
            separator: None,
        }
    }

    /// Max flow (capped at `limit`) between column vertices `s` and `t` with
    /// unit row capacities; returns the flow and, when below `limit`, the
    /// rows of a minimum cut.
    fn min_row_cut(&self, s: usize, t: usize, limit: usize) -> (usize, Vec<usize>) {
        let d = self.row_count;
        // Nodes: row_in j -> j, row_out j -> d + j, column i -> 2d + i.
        let n = 2 * d + self.col_count();
        let mut net = FlowNet::new(n);
        let inf = usize::MAX / 4;
        for j in 0..d {
            net.add_edge(j, d + j, 1);
        }
        for (i, list) in self.adjacency.iter().enumerate() {
            for &j in list {
                net.add_edge(2 * d + i, j, inf);
                net.add_edge(d + j, 2 * d + i, inf);
            }
        }
        let (source, sink) = (2 * d + s, 2 * d + t);
        let mut flow = 0;
        while flow < limit && net.augment(source, sink) {
            flow += 1;
        }
        if flow >= limit {
            return (flow, Vec::new());
        }
        let reach = net.reachable(source);
        let cut = (0..d).filter(|&j| reach[j] && !reach[d + j]).collect();
        (flow, cut)
    }
}

struct FlowNet {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<usize>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        Self {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: usize) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// One unit of flow along a BFS path; every source-sink path crosses a
    /// unit-capacity row edge, so a unit push is always valid.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let n = self.head.len();
        let mut via = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &e in &self.head[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > 0 {
                    seen[v] = true;
                    via[v] = e;
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let e = via[v];
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            v = self.to[e ^ 1];
        }
        true
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > 0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// Advances `combo` (strictly increasing indices below `n`) to the next
/// combination in lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for t in i + 1..k {
                combo[t] = combo[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Augmenting-path matching over an adjacency given as row lists per column.
/// Columns may be appended and removed at the end, which is how duplicated
/// columns are probed.
#[derive(Clone, Debug)]
pub(crate) struct MatchState {
    pub col_to_row: Vec<Option<usize>>,
    pub row_to_col: Vec<Option<usize>>,
}

impl MatchState {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            col_to_row: vec![None; cols],
            row_to_col: vec![None; rows],
        }
    }

    pub fn push_column(&mut self) {
        self.col_to_row.push(None);
    }

    /// Drops the last column, freeing its row if matched.
    pub fn pop_column(&mut self) {
        if let Some(Some(j)) = self.col_to_row.pop() {
            self.row_to_col[j] = None;
        }
    }

    /// Searches an alternating path from the unmatched column `start` to a
    /// free row by BFS and flips it. Returns whether the matching grew.
    pub fn augment(&mut self, adj: &[&[usize]], start: usize) -> bool {
        debug_assert!(self.col_to_row[start].is_none());
        let mut reached_from = vec![usize::MAX; self.row_to_col.len()];
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &j in adj[c] {
                if reached_from[j] != usize::MAX {
                    continue;
                }
                reached_from[j] = c;
                match self.row_to_col[j] {
                    Some(next) => queue.push_back(next),
                    None => {
                        let mut row = j;
                        loop {
                            let col = reached_from[row];
                            let previous = self.col_to_row[col];
                            self.col_to_row[col] = Some(row);
                            self.row_to_col[row] = Some(col);
                            match previous {
                                Some(p) => row = p,
                                None => break,
                            }
                        }
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Columns reachable from `start` along alternating paths. After a
    /// failed augmentation from `start` this set violates Hall's condition:
    /// all its neighbouring rows are matched into it.
    pub fn alternating_reach(&self, adj: &[&[usize]], start: usize) -> Vec<usize> {
        let mut seen_col = vec![false; self.col_to_row.len()];
        let mut seen_row = vec![false; self.row_to_col.len()];
        seen_col[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &j in adj[c] {
                if seen_row[j] {
                    continue;
                }
                seen_row[j] = true;
                if let Some(next) = self.row_to_col[j] {
                    if !seen_col[next] {
                        seen_col[next] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        (0..seen_col.len()).filter(|&c| seen_col[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> SamplingPattern {
        SamplingPattern::from_rows(
            &[
                vec![1, 0, 0, 0],
                vec![1, 1, 0, 0],
                vec![0, 1, 1, 0],
                vec![0, 0, 1, 1],
                vec![0, 0, 0, 1],
            ],
            1,
        )
        .unwrap()
    }

    fn ambiguous_line_pattern() -> SamplingPattern {
        SamplingPattern::from_rows(
            &[
                vec![1, 0, 1, 0],
                vec![1, 1, 0, 0],
                vec![0, 1, 1, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, 0, 1],
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn build_mirrors_pattern() {
        let g = BipartiteGraph::build(&chain());
        let mut edges: Vec<(usize, usize)> = g.edges().map(|(j, i)| (j + 1, i + 1)).collect();
        edges.sort_unstable_by_key(|&(j, i)| (i, j));
        assert_eq!(
            edges,
            vec![
                (1, 1),
                (2, 1),
                (2, 2),
                (3, 2),
                (3, 3),
                (4, 3),
                (4, 4),
                (5, 4)
            ]
        );
        let g1 = BipartiteGraph::build(&ambiguous_line_pattern());
        assert_eq!(g1.adjacency(2), &[0, 2]);
    }

    #[test]
    fn neighborhoods() {
        let g = BipartiteGraph::build(&chain());
        assert_eq!(g.neighborhood(&[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(g.neighborhood(&[]).unwrap().is_empty());
        assert!(g.neighborhood(&[4]).is_err());
        let g1 = BipartiteGraph::build(&ambiguous_line_pattern());
        let nb = g1.neighborhood(&[0, 1, 2]).unwrap();
        assert_eq!(nb, vec![0, 1, 2]);
        assert!(nb.len() < 3 + 1);
    }

    #[test]
    fn matching_sizes() {
        let m = BipartiteGraph::build(&chain()).max_matching();
        assert_eq!(m.size, 4);
        let star = BipartiteGraph::from_adjacency(3, vec![vec![0], vec![0], vec![0]]).unwrap();
        assert_eq!(star.max_matching().size, 1);
        let ident = BipartiteGraph::from_adjacency(5, (0..5).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(ident.max_matching().size, 5);
    }

    #[test]
    fn matching_pairs_are_edges_and_disjoint() {
        let g = BipartiteGraph::build(&ambiguous_line_pattern());
        let m = g.max_matching();
        let mut rows: Vec<usize> = m.pairs.iter().map(|&(_, r)| r).collect();
        rows.sort_unstable();
        rows.dedup();
        assert_eq!(rows.len(), m.size);
        for &(c, r) in &m.pairs {
            assert!(g.adjacency(c).contains(&r));
        }
    }

    #[test]
    fn connectivity_examples() {
        let g = BipartiteGraph::build(&chain());
        assert!(g.is_r_row_connected(1).unwrap().connected);
        let g1 = BipartiteGraph::build(&ambiguous_line_pattern());
        // Columns 1-3 and column 4 share no rows.
        let c = g1.is_r_row_connected(1).unwrap();
        assert!(!c.connected);
        assert_eq!(c.separator, Some(vec![]));
        assert!(!g1.row_connectivity_flow(1).connected);
    }

    #[test]
    fn flow_matches_exhaustive_on_small_cut() {
        // Two triangles of columns joined through row 2 only.
        let g =
            BipartiteGraph::from_adjacency(5, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]])
                .unwrap();
        for r in 1..=3 {
            let ex = g.row_connectivity_exhaustive(r);
            let fl = g.row_connectivity_flow(r);
            assert_eq!(ex.connected, fl.connected, "r = {r}");
            if let Some(sep) = fl.separator {
                assert!(sep.len() < r);
            }
        }
    }

    #[test]
    fn edge_list_is_one_based() {
        let g = BipartiteGraph::from_adjacency(2, vec![vec![1]]).unwrap();
        assert_eq!(g.to_edge_list(), "2 1\n");
    }

    #[test]
    fn combinations_and_binomials() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all.last().unwrap(), &vec![2, 3]);
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(1000, 500), u64::MAX);
    }
}

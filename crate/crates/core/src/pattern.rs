//! Sampling patterns and the expansion condition.
//!
//! A pattern is a `d × N` binary matrix whose column `i` marks the
//! coordinates seen by the `i`-th projection. The expansion condition asks
//! that every nonempty set of `n` columns touch at least `n + r` distinct
//! rows. Exhaustive subset enumeration is the reference definition; the
//! matching-based checker decides the same property in polynomial time.
//!
//! Column and row indices are 0-based throughout the library.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{parse_err, Error, Result};
use crate::graph::MatchState;
use crate::mask::Mask;
use crate::rng;
use crate::textio::Reader;

/// Largest column count accepted by [`check_identifiability_bruteforce`].
pub const BRUTE_FORCE_LIMIT: usize = 25;

/// Node budget for the backtracking fallback of [`find_valid_submatrix`].
pub const DEFAULT_SEARCH_BUDGET: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SamplingPattern {
    d: usize,
    r: usize,
    columns: Vec<Mask>,
}

/// Which support-size assumptions a pattern satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegimeFlags {
    /// Exactly `r + 1` sampled rows per column.
    pub a1: bool,
    /// At least `r` sampled rows per column.
    pub a1_prime: bool,
    /// At least `r + 1` sampled rows per column.
    pub a1_dprime: bool,
    /// Exactly `d - r` columns.
    pub a2: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Checker {
    BruteForce,
    Matching,
}

impl Checker {
    pub fn name(self) -> &'static str {
        match self {
            Checker::BruteForce => "brute_force",
            Checker::Matching => "matching",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionVerdict {
    pub satisfied: bool,
    /// A violating column set when `satisfied` is false.
    pub witness: Option<Vec<usize>>,
    pub checker: Checker,
}

impl ConditionVerdict {
    fn from_violation(violation: Option<Vec<usize>>, checker: Checker) -> Self {
        Self {
            satisfied: violation.is_none(),
            witness: violation,
            checker,
        }
    }
}

impl SamplingPattern {
    pub fn new(d: usize, r: usize, columns: Vec<Mask>) -> Result<Self> {
        if r == 0 || d <= r {
            return Err(Error::InvalidPattern(format!(
                "need 1 <= r < d, got r = {r}, d = {d}"
            )));
        }
        for (i, c) in columns.iter().enumerate() {
            if c.len() != d {
                return Err(Error::InvalidPattern(format!(
                    "column {i} has length {}, expected {d}",
                    c.len()
                )));
            }
            if c.none() {
                return Err(Error::InvalidPattern(format!("column {i} samples no rows")));
            }
        }
        Ok(Self { d, r, columns })
    }

    /// Builds a pattern from its row-major 0/1 picture.
    pub fn from_rows(rows: &[Vec<u8>], r: usize) -> Result<Self> {
        let d = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidPattern("ragged rows".into()));
        }
        let columns = (0..n)
            .map(|i| Mask::from_digits(&rows.iter().map(|row| row[i]).collect::<Vec<_>>()))
            .collect();
        Self::new(d, r, columns)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Mask] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &Mask {
        &self.columns[i]
    }

    /// Same pattern with a different target dimension.
    pub fn with_r(&self, r: usize) -> Result<Self> {
        Self::new(self.d, r, self.columns.clone())
    }

    /// Pattern formed by the given columns, in the given order.
    pub fn select(&self, cols: &[usize]) -> Self {
        Self {
            d: self.d,
            r: self.r,
            columns: cols.iter().map(|&i| self.columns[i].clone()).collect(),
        }
    }

    /// Rows sampled by at least one of `cols`; its popcount is `m(Ω')`.
    pub fn row_union(&self, cols: &[usize]) -> Mask {
        let mut u = Mask::zeros(self.d);
        for &i in cols {
            u.union_with(&self.columns[i]);
        }
        u
    }

    /// Whether `cols` violates `m ≥ n + r`.
    pub fn is_violating(&self, cols: &[usize]) -> bool {
        !cols.is_empty() && self.row_union(cols).count_ones() < cols.len() + self.r
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.d)
            .map(|j| self.columns.iter().map(|c| c.get(j) as u8).collect())
            .collect()
    }

    /// Text format: `d N r`, then `d` rows of `N` space-separated digits.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.d, self.n_cols(), self.r);
        for row in self.to_rows() {
            let digits: Vec<String> = row.iter().map(u8::to_string).collect();
            s.push_str(&digits.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = Reader::new(text);
        let header = reader.expect_line("pattern header \"d N r\"")?;
        header.expect_len(3, "header fields")?;
        let d = header.usize_at(0)?;
        let n = header.usize_at(1)?;
        let r = header.usize_at(2)?;
        if n == 0 {
            return Err(parse_err(
                header.number,
                header.tokens[1].column,
                "pattern needs at least one column",
            ));
        }
        if r == 0 || d <= r {
            return Err(parse_err(
                header.number,
                1,
                format!("need 1 <= r < d, got r = {r}, d = {d}"),
            ));
        }
        let mut columns = vec![Mask::zeros(d); n];
        for j in 0..d {
            let line = reader.expect_line("pattern row")?;
            for (i, bit) in line.bits(n)?.into_iter().enumerate() {
                columns[i].set(j, bit);
            }
        }
        reader.expect_end()?;
        if let Some(i) = columns.iter().position(Mask::none) {
            return Err(parse_err(
                header.number,
                1,
                format!("column {} samples no rows", i + 1),
            ));
        }
        Self::new(d, r, columns)
    }
}

pub fn classify(p: &SamplingPattern) -> RegimeFlags {
    let r = p.r();
    let sizes: Vec<usize> = p.columns().iter().map(Mask::count_ones).collect();
    RegimeFlags {
        a1: sizes.iter().all(|&s| s == r + 1),
        a1_prime: sizes.iter().all(|&s| s >= r),
        a1_dprime: sizes.iter().all(|&s| s > r),
        a2: p.n_cols() == p.d() - r,
    }
}

fn require_square_regime(p: &SamplingPattern) -> Result<()> {
    let f = classify(p);
    if !f.a1 {
        return Err(Error::Regime(format!(
            "every column must sample exactly r + 1 = {} rows",
            p.r() + 1
        )));
    }
    if !f.a2 {
        return Err(Error::Regime(format!(
            "pattern must have exactly d - r = {} columns, found {}",
            p.d() - p.r(),
            p.n_cols()
        )));
    }
    Ok(())
}

/// Reference checker: enumerates every nonempty column subset.
///
/// On failure the witness is a violating subset of minimum cardinality,
/// lexicographically smallest among those.
pub fn check_identifiability_bruteforce(p: &SamplingPattern) -> Result<ConditionVerdict> {
    require_square_regime(p)?;
    if p.n_cols() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyColumns {
            n: p.n_cols(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(ConditionVerdict::from_violation(
        min_violation_bruteforce(p),
        Checker::BruteForce,
    ))
}

/// Exhaustive search for a minimum-cardinality violating subset, with no
/// regime or size checks. Exponential in `N`.
pub fn min_violation_bruteforce(p: &SamplingPattern) -> Option<Vec<usize>> {
    struct Search<'a> {
        cols: &'a [Mask],
        r: usize,
        unions: Vec<Mask>,
        chosen: Vec<usize>,
        best: Option<Vec<usize>>,
    }

    impl Search<'_> {
        // Pre-order DFS over increasing index sequences visits subsets of a
        // given size in lexicographic order, so the first violator kept at
        // each size is the lexicographically smallest.
        fn visit(&mut self, start: usize) {
            let depth = self.chosen.len();
            for i in start..self.cols.len() {
                let (lo, hi) = self.unions.split_at_mut(depth + 1);
                hi[0].assign_union(&lo[depth], &self.cols[i]);
                self.chosen.push(i);
                let size = depth + 1;
                let best_len = self.best.as_ref().map_or(usize::MAX, Vec::len);
                if size < best_len && self.unions[size].count_ones() < size + self.r {
                    self.best = Some(self.chosen.clone());
                }
                let best_len = self.best.as_ref().map_or(usize::MAX, Vec::len);
                if size + 1 < best_len {
                    self.visit(i + 1);
                }
                self.chosen.pop();
            }
        }
    }

    let mut s = Search {
        cols: p.columns(),
        r: p.r(),
        unions: vec![Mask::zeros(p.d()); p.n_cols() + 1],
        chosen: Vec::with_capacity(p.n_cols()),
        best: None,
    };
    s.visit(0);
    s.best
}

/// Polynomial checker. Column `c` passes when the graph of the pattern with
/// `r` extra copies of `c` has a matching saturating all `N + r` columns;
/// the pattern satisfies the condition iff every column passes. On failure
/// the witness is the Hall violator of the failing matching with copies
/// folded back onto `c`.
pub fn check_identifiability_fast(p: &SamplingPattern) -> Result<ConditionVerdict> {
    require_square_regime(p)?;
    Ok(ConditionVerdict::from_violation(
        violation_by_matching(p),
        Checker::Matching,
    ))
}

/// The matching reduction without regime checks. Returns a violating
/// column set, or `None` when every subset satisfies `m ≥ n + r`.
pub fn violation_by_matching(p: &SamplingPattern) -> Option<Vec<usize>> {
    let n = p.n_cols();
    let r = p.r();
    let lists: Vec<Vec<usize>> = p.columns().iter().map(Mask::ones_vec).collect();
    let mut adj: Vec<&[usize]> = lists.iter().map(Vec::as_slice).collect();

    // Base matching on the original columns; a failure here already breaks
    // Hall's condition, a fortiori the expansion condition.
    let mut base = MatchState::new(p.d(), n);
    for c in 0..n {
        if !base.augment(&adj, c) {
            return Some(base.alternating_reach(&adj, c));
        }
    }

    for c in 0..n {
        let mut state = base.clone();
        adj.truncate(n);
        for k in 0..r {
            adj.push(&lists[c]);
            state.push_column();
            let copy = n + k;
            if !state.augment(&adj, copy) {
                let reach = state.alternating_reach(&adj, copy);
                let mut w: Vec<usize> = reach
                    .into_iter()
                    .map(|z| if z >= n { c } else { z })
                    .collect();
                w.sort_unstable();
                w.dedup();
                return Some(w);
            }
        }
    }
    None
}

/// Incrementally grown column set that always satisfies the expansion
/// condition. Adding column `x` to a valid set `T` is accepted iff the graph
/// of `T` plus `r + 1` copies of `x` can be saturated, which checks exactly
/// the subsets that contain `x`.
pub(crate) struct ExpandingSet<'a> {
    r: usize,
    members: Vec<usize>,
    adj: Vec<&'a [usize]>,
    state: MatchState,
}

impl<'a> ExpandingSet<'a> {
    pub fn new(d: usize, r: usize) -> Self {
        Self {
            r,
            members: Vec::new(),
            adj: Vec::new(),
            state: MatchState::new(d, 0),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Tries to add candidate `id` with row list `rows`. On rejection returns
    /// a violating set of candidate ids.
    pub fn try_add(&mut self, id: usize, rows: &'a [usize]) -> std::result::Result<(), Vec<usize>> {
        let base = self.members.len();
        let mut pushed = 0;
        let mut failure = None;
        for k in 0..=self.r {
            self.adj.push(rows);
            self.state.push_column();
            pushed += 1;
            if !self.state.augment(&self.adj, base + k) {
                let reach = self.state.alternating_reach(&self.adj, base + k);
                let mut w: Vec<usize> = reach
                    .into_iter()
                    .map(|z| if z >= base { id } else { self.members[z] })
                    .collect();
                w.sort_unstable();
                w.dedup();
                failure = Some(w);
                break;
            }
        }
        let keep = usize::from(failure.is_none());
        for _ in keep..pushed {
            self.adj.pop();
            self.state.pop_column();
        }
        match failure {
            None => {
                self.members.push(id);
                Ok(())
            }
            Some(w) => Err(w),
        }
    }

    pub fn pop(&mut self) {
        self.members.pop();
        self.adj.pop();
        self.state.pop_column();
    }
}

/// Expands every column with `ℓ_i > r + 1` sampled rows into `ℓ_i − r`
/// columns: the `j`-th keeps the first `r` sampled rows plus the
/// `(r + j)`-th. Columns with exactly `r + 1` rows are kept as they are.
pub fn split(p: &SamplingPattern) -> Result<SamplingPattern> {
    split_with_origin(p).map(|(s, _)| s)
}

/// [`split`] together with the source column of every output column.
pub fn split_with_origin(p: &SamplingPattern) -> Result<(SamplingPattern, Vec<usize>)> {
    let r = p.r();
    let mut columns = Vec::new();
    let mut origin = Vec::new();
    for (i, c) in p.columns().iter().enumerate() {
        let support = c.ones_vec();
        if support.len() < r + 1 {
            return Err(Error::Regime(format!(
                "column {i} samples {} rows; splitting needs at least r + 1 = {}",
                support.len(),
                r + 1
            )));
        }
        for &extra in &support[r..] {
            let mut m = Mask::from_indices(p.d(), &support[..r]);
            m.set(extra, true);
            columns.push(m);
            origin.push(i);
        }
    }
    Ok((SamplingPattern::new(p.d(), r, columns)?, origin))
}

/// Result of the valid-submatrix search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmatrixSearch {
    /// `d − r` column indices whose induced pattern satisfies the condition.
    pub found: Option<Vec<usize>>,
    /// Greedy augmentation alone fell short of `d − r` columns.
    pub greedy_stalled: bool,
    /// The backtracking fallback ran out of budget before finishing.
    pub budget_exhausted: bool,
}

/// Looks for `d − r` columns of `p` satisfying the expansion condition.
/// Every column must sample exactly `r + 1` rows (apply [`split`] first).
pub fn find_valid_submatrix(p: &SamplingPattern) -> Result<Option<Vec<usize>>> {
    Ok(find_valid_submatrix_with(p, DEFAULT_SEARCH_BUDGET)?.found)
}

/// Greedy augmentation in column order, falling back to depth-first
/// backtracking (at most `budget` extension attempts) when greedy stalls.
/// Subsets of a valid set are valid, so backtracking only ever extends
/// valid sets.
pub fn find_valid_submatrix_with(p: &SamplingPattern, budget: usize) -> Result<SubmatrixSearch> {
    if !classify(p).a1 {
        return Err(Error::Regime(format!(
            "every column must sample exactly r + 1 = {} rows; split the pattern first",
            p.r() + 1
        )));
    }
    let target = p.d() - p.r();
    let mut out = SubmatrixSearch {
        found: None,
        greedy_stalled: false,
        budget_exhausted: false,
    };
    if p.n_cols() < target {
        out.greedy_stalled = true;
        return Ok(out);
    }
    let lists: Vec<Vec<usize>> = p.columns().iter().map(Mask::ones_vec).collect();

    let mut greedy = ExpandingSet::new(p.d(), p.r());
    for (i, rows) in lists.iter().enumerate() {
        if greedy.try_add(i, rows).is_ok() && greedy.len() == target {
            out.found = Some(greedy.members().to_vec());
            return Ok(out);
        }
    }
    out.greedy_stalled = true;

    let (found, exhausted) = backtracking_search(&lists, p.d(), p.r(), target, budget);
    out.found = found;
    out.budget_exhausted = exhausted;
    Ok(out)
}

// A column rejected against a valid set is rejected against every
// superset of it, so rejections made at a node stay blocked below it.
fn backtrack<'a>(
    lists: &'a [Vec<usize>],
    pos: usize,
    set: &mut ExpandingSet<'a>,
    blocked: &mut [bool],
    target: usize,
    budget: &mut usize,
) -> Option<bool> {
    if set.len() == target {
        return Some(true);
    }
    let mut avail = blocked[pos..].iter().filter(|b| !**b).count();
    let mut rejected_here = Vec::new();
    let mut outcome = Some(false);
    for i in pos..lists.len() {
        if blocked[i] {
            continue;
        }
        if set.len() + avail < target {
            break;
        }
        avail -= 1;
        if *budget == 0 {
            outcome = None;
            break;
        }
        *budget -= 1;
        if set.try_add(i, &lists[i]).is_ok() {
            match backtrack(lists, i + 1, set, blocked, target, budget) {
                Some(false) => set.pop(),
                other => {
                    outcome = other;
                    break;
                }
            }
        } else {
            blocked[i] = true;
            rejected_here.push(i);
        }
    }
    for i in rejected_here {
        blocked[i] = false;
    }
    outcome
}

/// Depth-first search over column sets in index order. Returns the first
/// valid set of `target` columns and whether the budget ran out.
fn backtracking_search(
    lists: &[Vec<usize>],
    d: usize,
    r: usize,
    target: usize,
    budget: usize,
) -> (Option<Vec<usize>>, bool) {
    let mut set = ExpandingSet::new(d, r);
    let mut blocked = vec![false; lists.len()];
    let mut remaining = budget;
    match backtrack(lists, 0, &mut set, &mut blocked, target, &mut remaining) {
        Some(true) => (Some(set.members().to_vec()), false),
        Some(false) => (None, false),
        None => (None, true),
    }
}

/// Identifiability of the pattern for almost every subspace, allowing
/// columns with more than `r + 1` rows and any number of columns: split the
/// pattern and look for `d − r` columns satisfying the expansion condition.
/// Every column must sample at least `r + 1` rows.
pub fn is_identifiable(p: &SamplingPattern) -> Result<bool> {
    let flags = classify(p);
    if flags.a1 && flags.a2 {
        return Ok(violation_by_matching(p).is_none());
    }
    if !flags.a1_dprime {
        return Err(Error::Regime(format!(
            "every column must sample at least r + 1 = {} rows",
            p.r() + 1
        )));
    }
    Ok(find_valid_submatrix(&split(p)?)?.is_some())
}

/// Random pattern with `n_cols` columns, each sampling an `ell`-subset of
/// the rows chosen uniformly and independently.
pub fn random_pattern(
    d: usize,
    n_cols: usize,
    ell: usize,
    r: usize,
    seed: u64,
) -> Result<SamplingPattern> {
    random_pattern_with(&mut rng::from_seed(seed), d, n_cols, ell, r)
}

pub fn random_pattern_with<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    n_cols: usize,
    ell: usize,
    r: usize,
) -> Result<SamplingPattern> {
    if r == 0 || d <= r {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r < d, got r = {r}, d = {d}"
        )));
    }
    if ell < r + 1 || ell > d {
        return Err(Error::InvalidArgument(format!(
            "ell = {ell} must lie in [r + 1, d] = [{}, {d}]",
            r + 1
        )));
    }
    let columns = (0..n_cols)
        .map(|_| Mask::from_indices(d, &sample(rng, d, ell).into_vec()))
        .collect();
    SamplingPattern::new(d, r, columns)
}

/// Per-column sample size from the random-sampling guarantee.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EllBound {
    /// `min(d, ⌈max{9 ln(d/ε) + 12, 2r}⌉)`.
    pub ell: usize,
    /// Before capping at `d`.
    pub uncapped: usize,
    /// `r ≤ d/6`, the range in which the guarantee is stated.
    pub within_bound_range: bool,
}

/// Smallest integer `ℓ ≥ max{9 ln(d/ε) + 12, 2r}`, capped at `d`.
/// The logarithm is natural.
pub fn theorem2_ell(d: usize, r: usize, eps: f64) -> Result<EllBound> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} must lie in (0, 1]"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let bound = (9.0 * (d as f64 / eps).ln() + 12.0).max(2.0 * r as f64);
    let uncapped = bound.ceil() as usize;
    Ok(EllBound {
        ell: uncapped.min(d),
        uncapped,
        within_bound_range: 6 * r <= d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ambiguous_line_pattern() -> SamplingPattern {
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

    fn repaired_line_pattern() -> SamplingPattern {
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

    fn block_pattern(d: usize, r: usize) -> SamplingPattern {
        let cols = (0..d - r)
            .map(|i| {
                let mut m = Mask::from_indices(d, &(0..r).collect::<Vec<_>>());
                m.set(r + i, true);
                m
            })
            .collect();
        SamplingPattern::new(d, r, cols).unwrap()
    }

    #[test]
    fn classify_examples() {
        let f = classify(&ambiguous_line_pattern());
        assert!(f.a1 && f.a2 && f.a1_dprime && f.a1_prime);
        let ones = SamplingPattern::new(3, 1, vec![Mask::ones(3)]).unwrap();
        let f = classify(&ones);
        assert!(!f.a1 && f.a1_dprime && f.a1_prime);
    }

    #[test]
    fn bruteforce_ambiguous_line_pattern() {
        let v = check_identifiability_bruteforce(&ambiguous_line_pattern()).unwrap();
        assert!(!v.satisfied);
        assert_eq!(v.witness, Some(vec![0, 1, 2]));
        assert!(
            check_identifiability_bruteforce(&repaired_line_pattern())
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn bruteforce_block_patterns() {
        for d in 2..=20 {
            for r in 1..d {
                let p = block_pattern(d, r);
                if p.n_cols() > BRUTE_FORCE_LIMIT {
                    continue;
                }
                let v = check_identifiability_bruteforce(&p).unwrap();
                assert!(v.satisfied, "d = {d}, r = {r}");
            }
        }
    }

    #[test]
    fn bruteforce_rejects_outside_regime() {
        let p = ambiguous_line_pattern().select(&[0, 1, 2]);
        assert!(matches!(
            check_identifiability_bruteforce(&p),
            Err(Error::Regime(_))
        ));
        let wide = SamplingPattern::new(30, 1, vec![Mask::from_indices(30, &[0, 1]); 29]).unwrap();
        assert!(matches!(
            check_identifiability_bruteforce(&wide),
            Err(Error::TooManyColumns { .. })
        ));
    }

    #[test]
    fn fast_ambiguous_line_pattern() {
        let p = ambiguous_line_pattern();
        let v = check_identifiability_fast(&p).unwrap();
        assert!(!v.satisfied);
        let w = v.witness.unwrap();
        assert!(w.iter().all(|i| [0, 1, 2].contains(i)));
        assert!(p.is_violating(&w));
        assert!(
            check_identifiability_fast(&repaired_line_pattern())
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn split_examples() {
        let single = SamplingPattern::new(4, 1, vec![Mask::from_indices(4, &[1, 3])]).unwrap();
        assert_eq!(split(&single).unwrap(), single);

        let p = SamplingPattern::new(6, 2, vec![Mask::from_indices(6, &[0, 1, 2, 3, 4])]).unwrap();
        let s = split(&p).unwrap();
        let supports: Vec<Vec<usize>> = s.columns().iter().map(Mask::ones_vec).collect();
        assert_eq!(supports, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]);

        let thin = SamplingPattern::new(6, 2, vec![Mask::from_indices(6, &[0, 1])]).unwrap();
        assert!(split(&thin).is_err());
    }

    #[test]
    fn submatrix_examples() {
        let rep = repaired_line_pattern();
        assert_eq!(find_valid_submatrix(&rep).unwrap(), Some(vec![0, 1, 2, 3]));
        let search = find_valid_submatrix_with(&ambiguous_line_pattern(), 1000).unwrap();
        assert_eq!(search.found, None);
        assert!(search.greedy_stalled && !search.budget_exhausted);
    }

    #[test]
    fn chain_split_submatrix_matches_exhaustive() {
        // d = 6, r = 1: three 3-row columns chained through shared rows.
        let p = SamplingPattern::new(
            6,
            1,
            vec![
                Mask::from_indices(6, &[0, 1, 2]),
                Mask::from_indices(6, &[2, 3, 4]),
                Mask::from_indices(6, &[4, 5, 0]),
            ],
        )
        .unwrap();
        let s = split(&p).unwrap();
        assert_eq!(s.n_cols(), 6);
        let found = find_valid_submatrix(&s)
            .unwrap()
            .expect("a valid subset exists");
        assert_eq!(found.len(), 5);
        assert!(min_violation_bruteforce(&s.select(&found)).is_none());

        // Exhaustive oracle over all C(6, 5) subsets.
        let mut any = false;
        for skip in 0..6 {
            let cols: Vec<usize> = (0..6).filter(|&i| i != skip).collect();
            any |= min_violation_bruteforce(&s.select(&cols)).is_none();
        }
        assert!(any);
    }

    #[test]
    fn backtracking_agrees_with_greedy() {
        for seed in 0..200 {
            let p = random_pattern(7, 9, 2, 1, seed).unwrap();
            let lists: Vec<Vec<usize>> = p.columns().iter().map(Mask::ones_vec).collect();
            let greedy = find_valid_submatrix(&p).unwrap();
            let (bt, exhausted) = backtracking_search(&lists, 7, 1, 6, usize::MAX);
            assert!(!exhausted);
            assert_eq!(greedy.is_some(), bt.is_some(), "seed {seed}");
            if let Some(cols) = bt {
                assert!(min_violation_bruteforce(&p.select(&cols)).is_none());
            }
        }
        let (_, exhausted) = backtracking_search(&[vec![0, 1], vec![0, 1]], 3, 1, 2, 1);
        assert!(exhausted);
    }

    #[test]
    fn random_pattern_support_sizes() {
        let p = random_pattern(7, 1000, 3, 2, 5).unwrap();
        assert!(p.columns().iter().all(|c| c.count_ones() == 3));
        let full = random_pattern(5, 10, 5, 1, 5).unwrap();
        assert!(full.columns().iter().all(|c| c.count_ones() == 5));
        assert!(random_pattern(5, 10, 1, 1, 5).is_err());
        assert!(random_pattern(5, 10, 6, 1, 5).is_err());
        assert_eq!(
            random_pattern(9, 4, 3, 1, 11).unwrap(),
            random_pattern(9, 4, 3, 1, 11).unwrap()
        );
    }

    #[test]
    fn random_pattern_row_frequencies() {
        let (d, ell, n) = (10, 4, 10_000);
        let p = random_pattern(d, n, ell, 1, 77).unwrap();
        let prob = ell as f64 / d as f64;
        let sigma = (n as f64 * prob * (1.0 - prob)).sqrt();
        for j in 0..d {
            let count = p.columns().iter().filter(|c| c.get(j)).count() as f64;
            assert!(
                (count - n as f64 * prob).abs() < 3.0 * sigma,
                "row {j}: {count}"
            );
        }
    }

    #[test]
    fn theorem2_ell_examples() {
        let a = theorem2_ell(1000, 10, 0.5).unwrap();
        assert_eq!(a.ell, (9.0 * 2000f64.ln() + 12.0).ceil() as usize);
        assert_eq!(a.ell, 81);
        assert!(a.within_bound_range);
        assert_eq!(theorem2_ell(1000, 30, 0.01).unwrap().ell, 116);
        assert_eq!(theorem2_ell(600, 100, 1.0).unwrap().ell, 200);
        let capped = theorem2_ell(40, 3, 0.5).unwrap();
        assert_eq!((capped.ell, capped.uncapped), (40, 52));
        assert!(!theorem2_ell(60, 11, 0.5).unwrap().within_bound_range);
        assert!(theorem2_ell(60, 5, 0.0).is_err());
        assert!(theorem2_ell(60, 5, 1.5).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let p = ambiguous_line_pattern();
        let text = p.to_text();
        assert_eq!(text, "5 4 1\n1 0 1 0\n1 1 0 0\n0 1 1 0\n0 0 0 1\n0 0 0 1\n");
        assert_eq!(SamplingPattern::parse(&text).unwrap(), p);
        assert_eq!(
            SamplingPattern::parse("5 4 1\n1010\n1100\n0110\n0001\n0001\n").unwrap(),
            p
        );
        let err = SamplingPattern::parse("2 1 1\n1\n2\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                column: 1,
                ..
            }
        ));
        assert!(SamplingPattern::parse("2 1 1\n1\n0\n0\n").is_err());
    }
}

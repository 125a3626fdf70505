//! Low-rank matrix completion through the subspace lens.
//!
//! A partially observed matrix is a set of columns, each seen on its own
//! coordinate mask. A subspace *fits* the data when every observed column
//! lies in the subspace's restriction to that column's mask. This module
//! evaluates the necessary and sufficient sampling conditions for unique
//! completion and certifies a candidate completion against held-out
//! columns: if the held-out pattern is rich enough, fitting it is
//! equivalent (almost surely) to being the true subspace.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{parse_err, Error, Result};
use crate::linalg::{
    column_space, format_scalar, projection_residual, rank, restrict_rows, Matrix, Subspace,
    Tolerances,
};
use crate::mask::Mask;
use crate::pattern::{
    check_identifiability_fast, classify, find_valid_submatrix_with, split_with_origin, Checker,
    ConditionVerdict, SamplingPattern, DEFAULT_SEARCH_BUDGET,
};
use crate::rng;
use crate::textio::{parse_f64, Reader};

/// A `d × N` matrix observed only where its mask is set.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedMatrix {
    /// Unobserved positions hold 0 and are never read.
    values: Matrix,
    masks: Vec<Mask>,
}

impl ObservedMatrix {
    pub fn new(values: Matrix, masks: Vec<Mask>) -> Result<Self> {
        if masks.len() != values.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} masks for {} columns",
                masks.len(),
                values.cols()
            )));
        }
        if let Some(m) = masks.iter().find(|m| m.len() != values.rows()) {
            return Err(Error::DimensionMismatch(format!(
                "mask of length {} for {} rows",
                m.len(),
                values.rows()
            )));
        }
        let mut values = values;
        for (i, m) in masks.iter().enumerate() {
            for j in 0..values.rows() {
                if !m.get(j) {
                    values.set(j, i, 0.0);
                }
            }
        }
        Ok(Self { values, masks })
    }

    /// Observes `full` on the columns of `pattern`.
    pub fn sample(full: &Matrix, pattern: &SamplingPattern) -> Result<Self> {
        if full.rows() != pattern.d() || full.cols() != pattern.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} matrix for a {}×{} pattern",
                full.rows(),
                full.cols(),
                pattern.d(),
                pattern.n_cols()
            )));
        }
        Self::new(full.clone(), pattern.columns().to_vec())
    }

    pub fn d(&self) -> usize {
        self.values.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.cols()
    }

    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    /// Observed entries of column `i`, in row order.
    pub fn observed(&self, i: usize) -> Vec<f64> {
        self.masks[i]
            .iter_ones()
            .map(|j| self.values.get(j, i))
            .collect()
    }

    /// The columns listed in `cols`, in that order.
    pub fn select(&self, cols: &[usize]) -> Self {
        Self {
            values: self.values.select_columns(cols),
            masks: cols.iter().map(|&i| self.masks[i].clone()).collect(),
        }
    }

    /// Dense text with `*` at unobserved positions.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.d(), self.n_cols());
        for j in 0..self.d() {
            let row: Vec<String> = (0..self.n_cols())
                .map(|i| {
                    if self.masks[i].get(j) {
                        format_scalar(self.values.get(j, i))
                    } else {
                        "*".to_string()
                    }
                })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the dense format; `*` marks an unobserved entry.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_inner(text, None)
    }

    /// Parses values together with a pattern of the same shape. Entries
    /// outside the pattern are ignored (they may be `*` or numbers); entries
    /// inside it must be numbers.
    pub fn parse_with_pattern(text: &str, pattern: &SamplingPattern) -> Result<Self> {
        Self::parse_inner(text, Some(pattern))
    }

    fn parse_inner(text: &str, pattern: Option<&SamplingPattern>) -> Result<Self> {
        let mut reader = Reader::new(text);
        let header = reader.expect_line("matrix header \"rows cols\"")?;
        header.expect_len(2, "header fields")?;
        let d = header.usize_at(0)?;
        let n = header.usize_at(1)?;
        if d == 0 || n == 0 {
            return Err(parse_err(
                header.number,
                1,
                "matrix dimensions must be positive",
            ));
        }
        if let Some(p) = pattern {
            if p.d() != d || p.n_cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{d}×{n} values with a {}×{} pattern",
                    p.d(),
                    p.n_cols()
                )));
            }
        }
        let mut values = Matrix::zeros(d, n);
        let mut masks = vec![Mask::zeros(d); n];
        for j in 0..d {
            let line = reader.expect_line("matrix row")?;
            line.expect_len(n, "entries")?;
            for (i, mask) in masks.iter_mut().enumerate() {
                let tok = &line.tokens[i];
                let wanted = pattern.map(|p| p.column(i).get(j));
                match (tok.text, wanted) {
                    (_, Some(false)) => {}
                    ("*", Some(true)) => {
                        return Err(parse_err(
                            line.number,
                            tok.column,
                            "entry is in the pattern but marked unobserved",
                        ));
                    }
                    ("*", None) => {}
                    (t, _) => {
                        let v = parse_f64(t).ok_or_else(|| {
                            parse_err(
                                line.number,
                                tok.column,
                                format!("expected a finite decimal or *, found {t:?}"),
                            )
                        })?;
                        values.set(j, i, v);
                        mask.set(j, true);
                    }
                }
            }
        }
        reader.expect_end()?;
        Self::new(values, masks)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub fits: bool,
    /// Relative residual per column.
    pub residuals: Vec<f64>,
}

impl FitReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Residual of every observed column against the restriction of `s` to its
/// mask. Columns are processed in parallel.
pub fn fits(s: &Subspace, data: &ObservedMatrix, tol: &Tolerances) -> Result<FitReport> {
    if s.ambient_dim() != data.d() {
        return Err(Error::DimensionMismatch(format!(
            "subspace in R^{} against data with {} rows",
            s.ambient_dim(),
            data.d()
        )));
    }
    if let Some(i) = data.masks().iter().position(Mask::none) {
        return Err(Error::InvalidArgument(format!(
            "column {} has no observed entries",
            i + 1
        )));
    }
    let residuals = (0..data.n_cols())
        .into_par_iter()
        .map(|i| {
            let restricted = restrict_rows(s.basis(), &data.masks()[i])?;
            let q = column_space(&restricted, tol).columns();
            Ok(projection_residual(&q, &data.observed(i)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(FitReport {
        fits: residuals.iter().all(|&r| r <= tol.fit_rel),
        residuals,
    })
}

/// Distinct columns of a mask, in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctPatterns {
    pub columns: Vec<Mask>,
    pub multiplicity: Vec<usize>,
    /// Data columns carrying each distinct pattern.
    pub members: Vec<Vec<usize>>,
}

impl DistinctPatterns {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

pub fn distinct_patterns(masks: &[Mask]) -> DistinctPatterns {
    let mut index: HashMap<&Mask, usize> = HashMap::new();
    let mut out = DistinctPatterns {
        columns: Vec::new(),
        multiplicity: Vec::new(),
        members: Vec::new(),
    };
    for (i, m) in masks.iter().enumerate() {
        let k = *index.entry(m).or_insert_with(|| {
            out.columns.push(m.clone());
            out.multiplicity.push(0);
            out.members.push(Vec::new());
            out.columns.len() - 1
        });
        out.multiplicity[k] += 1;
        out.members[k].push(i);
    }
    out
}

/// One `(r + 1)`-row column of the split distinct pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitColumn {
    /// Index into the distinct patterns.
    pub source: usize,
    pub support: Mask,
    /// Data columns observed on a superset of `support`.
    pub carriers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub holds: bool,
    pub distinct: DistinctPatterns,
    /// Distinct patterns with `r` or fewer rows, left out of the search.
    pub dropped: Vec<usize>,
    /// The `d − r` split columns found, when the search succeeds.
    pub submatrix: Option<Vec<SplitColumn>>,
    /// The search hit its node budget; a negative answer is then unproven.
    pub search_exhausted: bool,
}

fn count_carriers(support: &Mask, masks: &[Mask]) -> usize {
    masks.iter().filter(|m| support.is_subset_of(m)).count()
}

fn check_rank_arg(d: usize, r: usize) -> Result<()> {
    if r == 0 || r >= d {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r < d, got r = {r}, d = {d}"
        )));
    }
    Ok(())
}

/// Searches the split distinct patterns for a valid `d × (d − r)`
/// submatrix, considering only split columns with at least `min_carriers`
/// carriers.
fn condition_search(
    masks: &[Mask],
    d: usize,
    r: usize,
    min_carriers: usize,
) -> Result<ConditionReport> {
    check_rank_arg(d, r)?;
    if let Some(m) = masks.iter().find(|m| m.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "mask of length {} for d = {d}",
            m.len()
        )));
    }
    let distinct = distinct_patterns(masks);
    let (kept, dropped): (Vec<usize>, Vec<usize>) =
        (0..distinct.len()).partition(|&k| distinct.columns[k].count_ones() > r);

    let mut candidates = Vec::new();
    if !kept.is_empty() {
        let base = SamplingPattern::new(
            d,
            r,
            kept.iter().map(|&k| distinct.columns[k].clone()).collect(),
        )?;
        let (split, origin) = split_with_origin(&base)?;
        for (support, o) in split.columns().iter().zip(origin) {
            let carriers = count_carriers(support, masks);
            if carriers >= min_carriers {
                candidates.push(SplitColumn {
                    source: kept[o],
                    support: support.clone(),
                    carriers,
                });
            }
        }
    }

    let mut report = ConditionReport {
        holds: false,
        distinct,
        dropped,
        submatrix: None,
        search_exhausted: false,
    };
    if candidates.len() < d - r {
        return Ok(report);
    }
    let p = SamplingPattern::new(d, r, candidates.iter().map(|c| c.support.clone()).collect())?;
    let search = find_valid_submatrix_with(&p, DEFAULT_SEARCH_BUDGET)?;
    report.search_exhausted = search.budget_exhausted;
    if let Some(idx) = search.found {
        report.holds = true;
        report.submatrix = Some(idx.into_iter().map(|i| candidates[i].clone()).collect());
    }
    Ok(report)
}

/// Whether the distinct columns of `masks`, after splitting, contain a
/// `d × (d − r)` submatrix satisfying the expansion condition. When this
/// fails, the completion is not unique.
pub fn necessary_condition(masks: &[Mask], d: usize, r: usize) -> Result<ConditionReport> {
    condition_search(masks, d, r, 0)
}

/// The necessary condition, plus: each column of the submatrix is observed
/// (on a superset of its rows) by at least `r` data columns. Requires every
/// column to observe at least `r` entries. When it holds, the completion is
/// unique for almost every subspace and almost every draw of the columns.
pub fn sufficient_condition(masks: &[Mask], d: usize, r: usize) -> Result<ConditionReport> {
    if let Some(i) = masks.iter().position(|m| m.count_ones() < r) {
        return Err(Error::Regime(format!(
            "column {} observes {} entries; at least r = {r} are required",
            i + 1,
            masks[i].count_ones()
        )));
    }
    condition_search(masks, d, r, r)
}

/// A candidate completion: either the completed matrix or its column span.
#[derive(Clone, Debug)]
pub enum Candidate {
    Matrix(Matrix),
    Subspace(Subspace),
}

/// Column span of a candidate of rank at most `r`.
pub fn candidate_span(candidate: &Candidate, r: usize, tol: &Tolerances) -> Result<Subspace> {
    match candidate {
        Candidate::Subspace(s) => {
            if s.dim() > r {
                return Err(Error::CandidateRank { rank: s.dim(), r });
            }
            Ok(s.clone())
        }
        Candidate::Matrix(m) => {
            let rk = rank(m, tol);
            if rk > r {
                return Err(Error::CandidateRank { rank: rk, r });
            }
            if rk == 0 {
                return Err(Error::InvalidArgument(
                    "candidate completion is the zero matrix".into(),
                ));
            }
            Subspace::from_orthonormal(column_space(m, tol), tol)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Validated,
    Rejected,
    InconclusivePattern,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Validated => "validated",
            Verdict::Rejected => "rejected",
            Verdict::InconclusivePattern => "inconclusive_pattern",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationCertificate {
    pub verdict: Verdict,
    /// Per held-out column.
    pub residuals: Vec<f64>,
    pub pattern_report: ConditionVerdict,
    /// Training and held-out column indices of the data the split came from.
    pub split: (Vec<usize>, Vec<usize>),
    pub r: usize,
    pub fit_rel: f64,
}

fn fmt_indices(idx: &[usize]) -> String {
    if idx.is_empty() {
        "none".to_string()
    } else {
        idx.iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl ValidationCertificate {
    /// Key-value text; indices are 1-based.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict {}", self.verdict.name());
        let _ = writeln!(s, "r {}", self.r);
        let _ = writeln!(s, "fit_rel {:.6e}", self.fit_rel);
        let _ = writeln!(s, "pattern_satisfied {}", self.pattern_report.satisfied);
        let _ = writeln!(s, "pattern_checker {}", self.pattern_report.checker.name());
        let _ = writeln!(
            s,
            "witness {}",
            self.pattern_report
                .witness
                .as_deref()
                .map_or("none".to_string(), fmt_indices)
        );
        let _ = writeln!(s, "train_columns {}", fmt_indices(&self.split.0));
        let _ = writeln!(s, "holdout_columns {}", fmt_indices(&self.split.1));
        let max = self.residuals.iter().copied().fold(0.0, f64::max);
        let _ = writeln!(s, "max_residual {max:.6e}");
        for (k, res) in self.residuals.iter().enumerate() {
            let _ = writeln!(s, "residual {} {res:.6e}", self.split.1[k] + 1);
        }
        s
    }
}

/// Certifies `candidate` against held-out data: all columns of `holdout`
/// form the validation set.
pub fn validate_completion(
    candidate: &Candidate,
    holdout: &ObservedMatrix,
    r: usize,
    tol: &Tolerances,
) -> Result<ValidationCertificate> {
    let all: Vec<usize> = (0..holdout.n_cols()).collect();
    validate_on_split(candidate, holdout, &all, r, tol)
}

/// Certifies `candidate` using the columns `holdout_cols` of `data` as the
/// validation set; the remaining columns are recorded as training columns.
pub fn validate_on_split(
    candidate: &Candidate,
    data: &ObservedMatrix,
    holdout_cols: &[usize],
    r: usize,
    tol: &Tolerances,
) -> Result<ValidationCertificate> {
    let d = data.d();
    check_rank_arg(d, r)?;
    let mut is_holdout = vec![false; data.n_cols()];
    for &i in holdout_cols {
        if i >= data.n_cols() || is_holdout[i] {
            return Err(Error::InvalidArgument(format!(
                "bad or repeated holdout column {}",
                i + 1
            )));
        }
        is_holdout[i] = true;
    }
    let s = candidate_span(candidate, r, tol)?;
    if s.ambient_dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "candidate in R^{} for data with {d} rows",
            s.ambient_dim()
        )));
    }
    let holdout = data.select(holdout_cols);
    let pattern_report = holdout_verdict(holdout.masks(), d, r)?;
    let report = fits(&s, &holdout, tol)?;
    let verdict = match (pattern_report.satisfied, report.fits) {
        (false, _) => Verdict::InconclusivePattern,
        (true, true) => Verdict::Validated,
        (true, false) => Verdict::Rejected,
    };
    let train = (0..data.n_cols()).filter(|&i| !is_holdout[i]).collect();
    Ok(ValidationCertificate {
        verdict,
        residuals: report.residuals,
        pattern_report,
        split: (train, holdout_cols.to_vec()),
        r,
        fit_rel: tol.fit_rel,
    })
}

/// Pattern verdict for a validation set. A set of exactly `d − r` columns
/// with `r + 1` rows each is checked directly (with a witness on failure);
/// anything else goes through the split-and-search route.
fn holdout_verdict(masks: &[Mask], d: usize, r: usize) -> Result<ConditionVerdict> {
    if masks.iter().all(|m| m.count_ones() > 0) {
        let p = SamplingPattern::new(d, r, masks.to_vec())?;
        let flags = classify(&p);
        if flags.a1 && flags.a2 {
            return check_identifiability_fast(&p);
        }
    }
    let report = necessary_condition(masks, d, r)?;
    Ok(ConditionVerdict {
        satisfied: report.holds,
        witness: None,
        checker: Checker::Matching,
    })
}

/// Picks a small validation set: columns whose split patterns contain a
/// valid `d × (d − r)` submatrix, pruned greedily so that no single column
/// can be dropped. Returns `(training, holdout)` column indices, or `None`
/// when no validation set exists.
pub fn choose_split(
    masks: &[Mask],
    d: usize,
    r: usize,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let report = necessary_condition(masks, d, r)?;
    let Some(sub) = report.submatrix else {
        return Ok(None);
    };
    let mut holdout: Vec<usize> = sub
        .iter()
        .map(|c| report.distinct.members[c.source][0])
        .collect();
    holdout.sort_unstable();
    holdout.dedup();
    let mut k = 0;
    while k < holdout.len() {
        let mut trial = holdout.clone();
        trial.remove(k);
        let sub_masks: Vec<Mask> = trial.iter().map(|&i| masks[i].clone()).collect();
        if !trial.is_empty() && necessary_condition(&sub_masks, d, r)?.holds {
            holdout = trial;
        } else {
            k += 1;
        }
    }
    let train = (0..masks.len())
        .filter(|i| holdout.binary_search(i).is_err())
        .collect();
    Ok(Some((train, holdout)))
}

/// `n_cols` columns drawn as `basis · g` with `g` standard normal.
pub fn synth(s: &Subspace, n_cols: usize, seed: u64) -> Result<Matrix> {
    synth_with(&mut rng::from_seed(seed), s, n_cols)
}

pub fn synth_with<R: Rng + ?Sized>(rng: &mut R, s: &Subspace, n_cols: usize) -> Result<Matrix> {
    if n_cols == 0 {
        return Err(Error::InvalidArgument("need at least one column".into()));
    }
    let coeffs: Vec<f64> = (0..s.dim() * n_cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let g = Matrix::new(s.dim(), n_cols, coeffs)?;
    s.basis().matmul(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_subspace;

    fn s_star() -> Subspace {
        Subspace::line(&[1.0, 2.0, 3.0, 4.0, 4.0]).unwrap()
    }

    fn s_wrong() -> Subspace {
        Subspace::line(&[1.0, 2.0, 3.0, 5.0, 5.0]).unwrap()
    }

    fn masks(supports: &[&[usize]]) -> Vec<Mask> {
        supports.iter().map(|s| Mask::from_indices(5, s)).collect()
    }

    fn original() -> Vec<Mask> {
        masks(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4]])
    }

    fn repaired() -> Vec<Mask> {
        masks(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4]])
    }

    fn observe(s: &Subspace, m: Vec<Mask>, seed: u64) -> ObservedMatrix {
        let x = synth(s, m.len(), seed).unwrap();
        ObservedMatrix::new(x, m).unwrap()
    }

    #[test]
    fn fits_examples() {
        let tol = Tolerances::default();
        let data = observe(&s_star(), original(), 1);
        let rep = fits(&s_star(), &data, &tol).unwrap();
        assert!(rep.fits && rep.max_residual() < 1e-14);

        // The wrong line agrees with every projection of the original pattern.
        assert!(fits(&s_wrong(), &data, &tol).unwrap().fits);

        let data = observe(&s_star(), repaired(), 2);
        let rep = fits(&s_wrong(), &data, &tol).unwrap();
        assert!(!rep.fits);
        // Rows {3,4}: x ∝ [3,4] against [3,5] leaves 3 / (5·√34).
        let expected = 3.0 / (5.0 * 34f64.sqrt());
        assert!((rep.residuals[2] - expected).abs() < 1e-12);
        assert!(rep.residuals[2] > 0.01);
    }

    #[test]
    fn fits_rejects_empty_column() {
        let data = ObservedMatrix::new(Matrix::zeros(5, 1), vec![Mask::zeros(5)]).unwrap();
        assert!(fits(&s_star(), &data, &Tolerances::default()).is_err());
    }

    #[test]
    fn distinct_pattern_examples() {
        let m = Mask::from_indices(4, &[0, 2]);
        let all = distinct_patterns(&vec![m.clone(); 5]);
        assert_eq!((all.len(), all.multiplicity.clone()), (1, vec![5]));

        let n = Mask::from_indices(4, &[1, 3]);
        let alt = distinct_patterns(&[m.clone(), n.clone(), m, n]);
        assert_eq!(alt.multiplicity, vec![2, 2]);
        assert_eq!(alt.members, vec![vec![0, 2], vec![1, 3]]);

        assert_eq!(distinct_patterns(&original()).len(), 4);
    }

    #[test]
    fn necessary_condition_examples() {
        assert!(!necessary_condition(&original(), 5, 1).unwrap().holds);
        let twice: Vec<Mask> = repaired().into_iter().chain(repaired()).collect();
        let rep = necessary_condition(&twice, 5, 1).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.distinct.len(), 4);
        for r in 1..5 {
            assert!(necessary_condition(&[Mask::ones(5)], 5, r).unwrap().holds);
        }
        let thin = masks(&[&[0], &[0, 1], &[1, 2], &[2, 3], &[3, 4]]);
        let rep = necessary_condition(&thin, 5, 1).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.dropped, vec![0]);
    }

    #[test]
    fn sufficient_condition_examples() {
        assert!(sufficient_condition(&repaired(), 5, 1).unwrap().holds);
        assert!(!sufficient_condition(&repaired(), 5, 2).unwrap().holds);
        let thin = masks(&[&[0], &[0, 1]]);
        assert!(matches!(
            sufficient_condition(&thin, 5, 2),
            Err(Error::Regime(_))
        ));

        // r = 2 with every 3-row pattern carried twice.
        let cols = masks(&[&[0, 1, 2], &[1, 2, 3], &[2, 3, 4]]);
        let doubled: Vec<Mask> = cols.iter().chain(&cols).cloned().collect();
        assert!(sufficient_condition(&doubled, 5, 2).unwrap().holds);
        assert!(!sufficient_condition(&cols, 5, 2).unwrap().holds);
    }

    #[test]
    fn validation_examples() {
        let tol = Tolerances::default();
        let valid = observe(&s_star(), repaired(), 3);
        let cert = validate_completion(&Candidate::Subspace(s_star()), &valid, 1, &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::Validated);

        let cert = validate_completion(&Candidate::Subspace(s_wrong()), &valid, 1, &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::Rejected);

        let invalid = observe(&s_star(), original(), 4);
        let cert = validate_completion(&Candidate::Subspace(s_wrong()), &invalid, 1, &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::InconclusivePattern);
        assert!(cert.residuals.iter().all(|&r| r <= tol.fit_rel));
        assert_eq!(cert.pattern_report.witness.as_ref().map(Vec::len), Some(3));

        let completed = synth(&s_star(), 6, 9).unwrap();
        let cert = validate_completion(&Candidate::Matrix(completed), &valid, 1, &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::Validated);

        let rank2 = synth(&random_subspace(5, 2, 1).unwrap(), 4, 2).unwrap();
        assert!(matches!(
            validate_completion(&Candidate::Matrix(rank2), &valid, 1, &tol),
            Err(Error::CandidateRank { rank: 2, r: 1 })
        ));
    }

    #[test]
    fn certificate_text_is_stable() {
        let tol = Tolerances::default();
        let valid = observe(&s_star(), repaired(), 3);
        let a = validate_completion(&Candidate::Subspace(s_wrong()), &valid, 1, &tol).unwrap();
        let b = validate_completion(&Candidate::Subspace(s_wrong()), &valid, 1, &tol).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let text = a.to_text();
        assert!(text.starts_with("verdict rejected\nr 1\nfit_rel 1.000000e-8\n"));
        assert!(text.contains("holdout_columns 1 2 3 4\n"));
    }

    #[test]
    fn choose_split_is_disjoint_and_valid() {
        let data: Vec<Mask> = repaired().into_iter().chain(original()).collect();
        let (train, holdout) = choose_split(&data, 5, 1).unwrap().unwrap();
        assert_eq!(train.len() + holdout.len(), data.len());
        assert!(train.iter().all(|i| !holdout.contains(i)));
        let hm: Vec<Mask> = holdout.iter().map(|&i| data[i].clone()).collect();
        assert!(necessary_condition(&hm, 5, 1).unwrap().holds);
        assert_eq!(holdout.len(), 4);
        assert!(choose_split(&original(), 5, 1).unwrap().is_none());
    }

    #[test]
    fn synth_examples() {
        let tol = Tolerances::default();
        let x = synth(&s_star(), 3, 5).unwrap();
        for c in x.columns() {
            assert!(s_star().relative_residual(&c) < 1e-12);
            let ratio = c[1] / c[0];
            assert!((ratio - 2.0).abs() < 1e-12);
        }
        let s = random_subspace(8, 3, 4).unwrap();
        assert_eq!(rank(&synth(&s, 10, 6).unwrap(), &tol), 3);
        assert_eq!(synth(&s, 4, 6).unwrap(), synth(&s, 4, 6).unwrap());
        assert!(synth(&s, 0, 6).is_err());
    }

    #[test]
    fn observed_text_round_trip() {
        let data = observe(&s_star(), original(), 8);
        let text = data.to_text();
        assert_eq!(text.lines().nth(5).unwrap().split(' ').next(), Some("*"));
        assert_eq!(ObservedMatrix::parse(&text).unwrap(), data);

        let p = SamplingPattern::new(5, 1, original()).unwrap();
        let full = synth(&s_star(), 4, 8).unwrap();
        let via_pattern = ObservedMatrix::parse_with_pattern(&full.to_text(), &p).unwrap();
        assert_eq!(via_pattern, ObservedMatrix::sample(&full, &p).unwrap());

        let err = ObservedMatrix::parse("1 2\n* x\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 2,
                column: 3,
                ..
            }
        ));
    }
}

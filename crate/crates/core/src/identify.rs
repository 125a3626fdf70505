//! Constructive recovery of a subspace from its coordinate projections.
//!
//! Each projection onto `r + 1` coordinates is an `r`-dimensional subspace
//! of `R^{r+1}` and so has a one-dimensional orthogonal complement. Lifting
//! those normal vectors back to `R^d` (zeros off the mask) gives a matrix
//! `A` whose columns are all orthogonal to the unknown subspace; when
//! `dim ker Aᵀ = r` that kernel *is* the subspace.
//!
//! A projection onto `ℓ > r + 1` coordinates contributes its whole
//! `(ℓ − r)`-dimensional normal space. Projections onto `r` or fewer
//! coordinates constrain nothing and are skipped with a warning.

use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::linalg::{
    format_scalar, kernel_basis, norm, orthonormalize, rank, restrict_rows, symmetric_eigenvalues,
    Matrix, Subspace, Tolerances,
};
use crate::mask::Mask;
use crate::textio::Reader;

/// Entries of a kernel vector smaller than this fraction of its norm are
/// reported as a genericity warning.
pub const SMALL_ENTRY_RATIO: f64 = 1e-6;

/// A coordinate mask together with a basis of the subspace seen through it.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionObservation {
    mask: Mask,
    /// `ones(mask) × r`, full column rank.
    basis: Matrix,
}

impl ProjectionObservation {
    pub fn new(mask: Mask, basis: Matrix, tol: &Tolerances) -> Result<Self> {
        let ell = mask.count_ones();
        if basis.rows() != ell {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} rows but the mask samples {ell} coordinates",
                basis.rows()
            )));
        }
        if basis.cols() > ell {
            return Err(Error::DimensionMismatch(format!(
                "{} basis columns cannot be independent in R^{ell}",
                basis.cols()
            )));
        }
        let rk = rank(&basis, tol);
        if rk != basis.cols() {
            return Err(Error::RankDeficient(format!(
                "observed basis has rank {rk}, expected {}",
                basis.cols()
            )));
        }
        Ok(Self { mask, basis })
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn r(&self) -> usize {
        self.basis.cols()
    }
}

/// Restricts `s` to the coordinates in `mask` and orthonormalizes.
///
/// Fails with [`Error::RankDeficient`] when the restriction loses dimension,
/// which happens only for subspaces in a measure-zero set.
pub fn project(s: &Subspace, mask: &Mask, tol: &Tolerances) -> Result<ProjectionObservation> {
    let r = s.dim();
    let ell = mask.count_ones();
    if ell < r + 1 {
        return Err(Error::InvalidArgument(format!(
            "mask samples {ell} coordinates; a proper projection needs at least r + 1 = {}",
            r + 1
        )));
    }
    let restricted = restrict_rows(s.basis(), mask)?;
    // The source basis is orthonormal, so the restricted singular values lie
    // in [0, 1] and an absolute threshold is meaningful.
    let gram = restricted.transpose().matmul(&restricted)?;
    let sigma_min = symmetric_eigenvalues(&gram)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
        .sqrt();
    if sigma_min <= tol.rank_rel {
        return Err(Error::RankDeficient(format!(
            "restriction to {ell} coordinates has smallest singular value {sigma_min:e}"
        )));
    }
    let q = orthonormalize(restricted.columns(), None);
    Ok(ProjectionObservation {
        mask: mask.clone(),
        basis: Matrix::from_columns_unchecked(ell, &q),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelVector {
    /// Unit norm, first significant entry positive.
    pub vector: Vec<f64>,
    /// Positions whose magnitude is below [`SMALL_ENTRY_RATIO`] of the norm.
    /// Nonempty only for non-generic subspaces.
    pub small_entries: Vec<usize>,
}

impl KernelVector {
    pub fn is_generic(&self) -> bool {
        self.small_entries.is_empty()
    }
}

/// The normal direction of an `r`-dimensional projection inside `R^{r+1}`.
pub fn kernel_vector(obs: &ProjectionObservation, tol: &Tolerances) -> Result<KernelVector> {
    let k = kernel_basis(&obs.basis.transpose(), tol);
    if k.cols() != 1 {
        return Err(Error::KernelDimension(k.cols()));
    }
    let mut v = k.column(0);
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    let small_entries: Vec<usize> = (0..v.len())
        .filter(|&i| v[i].abs() < SMALL_ENTRY_RATIO)
        .collect();
    let lead = v
        .iter()
        .copied()
        .find(|x| x.abs() >= SMALL_ENTRY_RATIO)
        .unwrap_or(v[0]);
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(KernelVector {
        vector: v,
        small_entries,
    })
}

/// Scatters `a` into the support of `mask`, zeros elsewhere.
pub fn lift(a: &[f64], mask: &Mask, d: usize) -> Result<Vec<f64>> {
    if mask.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "mask of length {} for ambient dimension {d}",
            mask.len()
        )));
    }
    if mask.count_ones() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a mask with {} ones",
            a.len(),
            mask.count_ones()
        )));
    }
    let mut out = vec![0.0; d];
    for (&x, j) in a.iter().zip(mask.iter_ones()) {
        out[j] = x;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum RecoveryWarning {
    /// A kernel entry is numerically zero: the subspace sits on the
    /// measure-zero set where some coordinate restriction degenerates.
    SmallKernelEntry { observation: usize, row: usize },
    /// The observation samples `r` or fewer coordinates and was skipped.
    TooFewRows { observation: usize, rows: usize },
}

impl fmt::Display for RecoveryWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecoveryWarning::SmallKernelEntry { observation, row } => write!(
                f,
                "observation {}: kernel entry at row {} is numerically zero (non-generic subspace)",
                observation + 1,
                row + 1
            ),
            RecoveryWarning::TooFewRows { observation, rows } => write!(
                f,
                "observation {}: only {rows} coordinates sampled, skipped",
                observation + 1
            ),
        }
    }
}

/// The lifted kernel vectors of a set of observations.
#[derive(Clone, Debug, PartialEq)]
pub struct Assembly {
    /// `d × M`, one column per lifted kernel direction.
    pub matrix: Matrix,
    /// Observation index of each column.
    pub origin: Vec<usize>,
    pub warnings: Vec<RecoveryWarning>,
}

fn check_observations(observations: &[ProjectionObservation], d: usize, r: usize) -> Result<()> {
    for (i, o) in observations.iter().enumerate() {
        if o.mask.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "observation {}: mask of length {} for ambient dimension {d}",
                i + 1,
                o.mask.len()
            )));
        }
        if o.r() != r {
            return Err(Error::DimensionMismatch(format!(
                "observation {}: basis has {} columns, expected r = {r}",
                i + 1,
                o.r()
            )));
        }
    }
    Ok(())
}

/// Builds the matrix of lifted kernel directions.
pub fn assemble_a(
    observations: &[ProjectionObservation],
    d: usize,
    tol: &Tolerances,
) -> Result<Assembly> {
    let mut columns = Vec::new();
    let mut origin = Vec::new();
    let mut warnings = Vec::new();
    for (i, o) in observations.iter().enumerate() {
        let r = o.r();
        let ell = o.mask.count_ones();
        if o.mask.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "observation {}: mask of length {} for ambient dimension {d}",
                i + 1,
                o.mask.len()
            )));
        }
        if ell <= r {
            warnings.push(RecoveryWarning::TooFewRows {
                observation: i,
                rows: ell,
            });
            continue;
        }
        let rows = o.mask.ones_vec();
        if ell == r + 1 {
            let kv = kernel_vector(o, tol)?;
            for &k in &kv.small_entries {
                warnings.push(RecoveryWarning::SmallKernelEntry {
                    observation: i,
                    row: rows[k],
                });
            }
            columns.push(lift(&kv.vector, &o.mask, d)?);
            origin.push(i);
        } else {
            let k = kernel_basis(&o.basis.transpose(), tol);
            if k.cols() != ell - r {
                return Err(Error::KernelDimension(k.cols()));
            }
            for c in 0..k.cols() {
                columns.push(lift(&k.column(c), &o.mask, d)?);
                origin.push(i);
            }
        }
    }
    Ok(Assembly {
        matrix: Matrix::from_columns_unchecked(d, &columns),
        origin,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecoveryStatus {
    Identified,
    Underdetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    pub status: RecoveryStatus,
    /// Present exactly when identified.
    pub subspace: Option<Subspace>,
    /// `dim ker Aᵀ`.
    pub kernel_dim: usize,
    /// Orthonormal basis of `ker Aᵀ`; every consistent subspace lies in it.
    pub kernel: Matrix,
    pub assembled: Matrix,
    pub warnings: Vec<RecoveryWarning>,
}

impl RecoveryResult {
    pub fn is_identified(&self) -> bool {
        self.status == RecoveryStatus::Identified
    }
}

/// Flips each column so its first significant entry is positive.
fn canonical_signs(m: &mut Matrix) {
    for c in 0..m.cols() {
        let col = m.column(c);
        let scale = col.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let lead = col
            .iter()
            .copied()
            .find(|x| x.abs() > SMALL_ENTRY_RATIO * scale);
        if lead.is_some_and(|x| x < 0.0) {
            for (i, x) in col.into_iter().enumerate() {
                m.set(i, c, -x);
            }
        }
    }
}

/// Recovers the subspace as `ker Aᵀ`, or reports how many dimensions the
/// observations leave undetermined.
pub fn recover(
    observations: &[ProjectionObservation],
    d: usize,
    r: usize,
    tol: &Tolerances,
) -> Result<RecoveryResult> {
    if observations.is_empty() {
        return Err(Error::InvalidArgument("no observations".into()));
    }
    if r == 0 || r >= d {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r < d, got r = {r}, d = {d}"
        )));
    }
    check_observations(observations, d, r)?;
    let asm = assemble_a(observations, d, tol)?;
    let mut kernel = if asm.matrix.cols() == 0 {
        Matrix::identity(d)
    } else {
        kernel_basis(&asm.matrix.transpose(), tol)
    };
    canonical_signs(&mut kernel);
    let kernel_dim = kernel.cols();
    if kernel_dim < r {
        return Err(Error::Inconsistent { kernel_dim, r });
    }
    let (status, subspace) = if kernel_dim == r {
        (
            RecoveryStatus::Identified,
            Some(Subspace::from_orthonormal(kernel.clone(), tol)?),
        )
    } else {
        (RecoveryStatus::Underdetermined, None)
    };
    Ok(RecoveryResult {
        status,
        subspace,
        kernel_dim,
        kernel,
        assembled: asm.matrix,
        warnings: asm.warnings,
    })
}

/// Observation file contents.
///
/// Format: `d r N`, then per observation one line with the `d` mask bits
/// followed by `r` lines, each holding one basis column restricted to the
/// mask (so `ones(mask)` scalars per line).
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSet {
    pub d: usize,
    pub r: usize,
    pub observations: Vec<ProjectionObservation>,
}

impl ObservationSet {
    /// Projects `s` onto every mask.
    pub fn from_subspace(s: &Subspace, masks: &[Mask], tol: &Tolerances) -> Result<Self> {
        let observations = masks
            .iter()
            .map(|m| project(s, m, tol))
            .collect::<Result<_>>()?;
        Ok(Self {
            d: s.ambient_dim(),
            r: s.dim(),
            observations,
        })
    }

    pub fn recover(&self, tol: &Tolerances) -> Result<RecoveryResult> {
        recover(&self.observations, self.d, self.r, tol)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.d, self.r, self.observations.len());
        for o in &self.observations {
            let bits: Vec<String> = o.mask.to_digits().iter().map(u8::to_string).collect();
            s.push_str(&bits.join(" "));
            s.push('\n');
            for c in 0..o.r() {
                let vals: Vec<String> = o.basis.column(c).into_iter().map(format_scalar).collect();
                s.push_str(&vals.join(" "));
                s.push('\n');
            }
        }
        s
    }

    pub fn parse(text: &str, tol: &Tolerances) -> Result<Self> {
        let mut reader = Reader::new(text);
        let header = reader.expect_line("observation header \"d r N\"")?;
        header.expect_len(3, "header fields")?;
        let d = header.usize_at(0)?;
        let r = header.usize_at(1)?;
        let n = header.usize_at(2)?;
        if r == 0 || d <= r {
            return Err(parse_err(
                header.number,
                1,
                format!("need 1 <= r < d, got r = {r}, d = {d}"),
            ));
        }
        if n == 0 {
            return Err(parse_err(
                header.number,
                header.tokens[2].column,
                "need at least one observation",
            ));
        }
        let mut observations = Vec::with_capacity(n);
        for _ in 0..n {
            let mask_line = reader.expect_line("observation mask")?;
            let mask = Mask::from_bools(&mask_line.bits(d)?);
            let ell = mask.count_ones();
            if ell < r {
                return Err(parse_err(
                    mask_line.number,
                    1,
                    format!("mask samples {ell} coordinates, fewer than r = {r}"),
                ));
            }
            let mut cols = Vec::with_capacity(r);
            for _ in 0..r {
                let line = reader.expect_line("basis column")?;
                line.expect_len(ell, "values")?;
                cols.push(
                    (0..ell)
                        .map(|k| line.f64_at(k))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            let basis = Matrix::from_columns(&cols)?;
            let obs = ProjectionObservation::new(mask, basis, tol)
                .map_err(|e| parse_err(mask_line.number, 1, e.to_string()))?;
            observations.push(obs);
        }
        reader.expect_end()?;
        Ok(Self { d, r, observations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::subspace_distance;

    fn s_star() -> Subspace {
        Subspace::line(&[1.0, 2.0, 3.0, 4.0, 4.0]).unwrap()
    }

    fn masks(supports: &[&[usize]]) -> Vec<Mask> {
        supports.iter().map(|s| Mask::from_indices(5, s)).collect()
    }

    fn obs(mask: &[u8], basis: &[f64]) -> ProjectionObservation {
        ProjectionObservation::new(
            Mask::from_digits(mask),
            Matrix::column_vector(basis).unwrap(),
            &Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn project_examples() {
        let tol = Tolerances::default();
        let o = project(&s_star(), &Mask::from_digits(&[1, 0, 1, 0, 0]), &tol).unwrap();
        let b = o.basis().column(0);
        assert!((b[0] * 3.0 - b[1]).abs() < 1e-15);

        let full = project(&s_star(), &Mask::ones(5), &tol).unwrap();
        let back = Subspace::from_orthonormal(full.basis().clone(), &tol).unwrap();
        assert!(subspace_distance(&back, &s_star()).unwrap() < 1e-12);

        let e1 = Subspace::line(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let err = project(&e1, &Mask::from_digits(&[0, 1, 1, 0, 0]), &tol).unwrap_err();
        assert!(matches!(err, Error::RankDeficient(_)));
    }

    #[test]
    fn kernel_vector_examples() {
        let tol = Tolerances::default();
        let kv = kernel_vector(&obs(&[1, 1, 0, 0, 0], &[1.0, 2.0]), &tol).unwrap();
        let s5 = 5f64.sqrt();
        assert!((kv.vector[0] - 2.0 / s5).abs() < 1e-15 && (kv.vector[1] + 1.0 / s5).abs() < 1e-15);
        assert!(kv.is_generic());

        let kv = kernel_vector(&obs(&[0, 0, 0, 1, 1], &[4.0, 4.0]), &tol).unwrap();
        let s2 = 2f64.sqrt();
        assert!((kv.vector[0] - 1.0 / s2).abs() < 1e-15 && (kv.vector[1] + 1.0 / s2).abs() < 1e-15);

        let id = ProjectionObservation::new(
            Mask::from_digits(&[1, 1, 1, 0]),
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap(),
            &tol,
        )
        .unwrap();
        let kv = kernel_vector(&id, &tol).unwrap();
        assert_eq!(kv.vector, vec![0.0, 0.0, 1.0]);
        assert_eq!(kv.small_entries, vec![0, 1]);

        let wide = obs(&[1, 1, 1, 0, 0], &[1.0, 2.0, 3.0]);
        assert!(matches!(
            kernel_vector(&wide, &tol),
            Err(Error::KernelDimension(2))
        ));
    }

    #[test]
    fn lift_examples() {
        let m = Mask::from_digits(&[1, 1, 0, 0, 0]);
        assert_eq!(
            lift(&[2.0, -1.0], &m, 5).unwrap(),
            vec![2.0, -1.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            lift(&[1.0, 2.0], &Mask::ones(2), 2).unwrap(),
            vec![1.0, 2.0]
        );
        assert!(lift(&[1.0], &m, 5).is_err());
        assert!(lift(&[1.0, 2.0], &m, 6).is_err());
    }

    #[test]
    fn assembled_repaired_line_pattern() {
        let tol = Tolerances::default();
        let set = ObservationSet::from_subspace(
            &s_star(),
            &masks(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4]]),
            &tol,
        )
        .unwrap();
        let asm = assemble_a(&set.observations, 5, &tol).unwrap();
        assert_eq!((asm.matrix.rows(), asm.matrix.cols()), (5, 4));
        assert_eq!(rank(&asm.matrix, &tol), 4);
        // Hand kernels [2,-1], [3,-2], [4,-3], [1,-1] up to scale.
        let expected = [[2.0, -1.0], [3.0, -2.0], [4.0, -3.0], [1.0, -1.0]];
        for (c, e) in expected.iter().enumerate() {
            let col = asm.matrix.column(c);
            let nz: Vec<f64> = col.iter().copied().filter(|x| *x != 0.0).collect();
            assert_eq!(nz.len(), 2);
            assert!((nz[0] * e[1] - nz[1] * e[0]).abs() < 1e-14);
        }
        let rec = set.recover(&tol).unwrap();
        assert!(rec.is_identified());
        assert!(subspace_distance(rec.subspace.as_ref().unwrap(), &s_star()).unwrap() <= 1e-9);
    }

    #[test]
    fn ambiguous_line_pattern_original_is_underdetermined() {
        let tol = Tolerances::default();
        let set = ObservationSet::from_subspace(
            &s_star(),
            &masks(&[&[0, 1], &[1, 2], &[0, 2], &[3, 4]]),
            &tol,
        )
        .unwrap();
        let rec = set.recover(&tol).unwrap();
        assert_eq!(rec.status, RecoveryStatus::Underdetermined);
        assert_eq!(rec.kernel_dim, 2);
        // span[1 2 3 α α] lies in the kernel for every α.
        let k = Subspace::from_orthonormal(rec.kernel.clone(), &tol).unwrap();
        for alpha in [1.0, 5.0, -2.0] {
            assert!(k.relative_residual(&[1.0, 2.0, 3.0, alpha, alpha]) < 1e-12);
        }
    }

    #[test]
    fn single_full_observation() {
        let tol = Tolerances::default();
        let s = Subspace::from_basis(
            &Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            &tol,
        )
        .unwrap();
        let set = ObservationSet::from_subspace(&s, &[Mask::ones(3)], &tol).unwrap();
        let asm = assemble_a(&set.observations, 3, &tol).unwrap();
        assert_eq!(asm.matrix.cols(), 1);
        assert!(asm.matrix.column(0).iter().all(|x| x.abs() > 0.1));
        let rec = set.recover(&tol).unwrap();
        assert!(subspace_distance(rec.subspace.as_ref().unwrap(), &s).unwrap() < 1e-12);
    }

    #[test]
    fn thin_observations_are_skipped() {
        let tol = Tolerances::default();
        let o = ProjectionObservation::new(
            Mask::from_digits(&[0, 1, 0]),
            Matrix::column_vector(&[1.0]).unwrap(),
            &tol,
        )
        .unwrap();
        let rec = recover(&[o], 3, 1, &tol).unwrap();
        assert_eq!(rec.kernel_dim, 3);
        assert_eq!(
            rec.warnings,
            vec![RecoveryWarning::TooFewRows {
                observation: 0,
                rows: 1
            }]
        );
    }

    #[test]
    fn inconsistent_observations_are_reported() {
        let tol = Tolerances::default();
        // Lines through [1,1] and [1,-1] on the same two coordinates.
        let a = obs(&[1, 1, 0], &[1.0, 1.0]);
        let b = obs(&[1, 1, 0], &[1.0, -1.0]);
        let c = obs(&[0, 1, 1], &[1.0, 1.0]);
        let err = recover(&[a, b, c], 3, 1, &tol).unwrap_err();
        assert!(matches!(
            err,
            Error::Inconsistent {
                kernel_dim: 0,
                r: 1
            }
        ));
    }

    #[test]
    fn observation_file_round_trip() {
        let tol = Tolerances::default();
        let set = ObservationSet::from_subspace(
            &s_star(),
            &masks(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4]]),
            &tol,
        )
        .unwrap();
        let text = set.to_text();
        assert!(text.starts_with("5 1 4\n1 1 0 0 0\n"));
        let back = ObservationSet::parse(&text, &tol).unwrap();
        assert_eq!(back, set);

        let err = ObservationSet::parse("5 1 1\n1 1 0 0 0\n1 x\n", &tol).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                column: 3,
                ..
            }
        ));
        assert!(ObservationSet::parse("5 1 1\n1 1 0 0 0\n0 0\n", &tol).is_err());
    }
}

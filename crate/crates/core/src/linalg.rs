//! Dense linear algebra: rank, null spaces, row restriction and subspace
//! geometry at desk scale.
//!
//! Rank and kernels come from Gauss-Jordan elimination with complete
//! pivoting. A pivot is accepted while its magnitude exceeds
//! `rank_rel * max|m_ij|`; with complete pivoting the first pivot is the
//! largest entry, so this is the relative pivot threshold. Kernel bases are
//! orthonormalized by modified Gram-Schmidt with one re-orthogonalization
//! pass.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::rng;
use crate::textio::Reader;

/// Numerical thresholds. The exact statements being checked hold for
/// almost every subspace; these knobs decide what "zero" means in floating
/// point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative pivot threshold for rank decisions.
    pub rank_rel: f64,
    /// Allowed deviation of `basisᵀ·basis` from the identity.
    pub orth: f64,
    /// Relative residual below which a column counts as fitted.
    pub fit_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: 1e-9,
            orth: 1e-10,
            fit_rel: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rank_rel: f64, orth: f64, fit_rel: f64) -> Result<Self> {
        let t = Self {
            rank_rel,
            orth,
            fit_rel,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("orth", self.orth),
            ("fit_rel", self.fit_rel),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {name} = {v} must lie in (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// Row-major dense matrix of finite reals.
///
/// Matrices built from user data have at least one row and one column.
/// Kernel bases may legitimately have zero columns, so the internal
/// [`Matrix::zeros`] constructor allows empty shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "shape {rows}x{cols} has an empty dimension"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                k / cols,
                k % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidMatrix("ragged columns".into()));
        }
        let mut data = Vec::with_capacity(rows * columns.len());
        for i in 0..rows {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(rows, columns.len(), data)
    }

    /// Column vector.
    pub fn column_vector(v: &[f64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Assembles columns that were produced internally (no finiteness
    /// check, zero columns allowed).
    pub(crate) fn from_columns_unchecked(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length does not match columns");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    /// Dense text format: `rows cols`, then one whitespace-separated row per
    /// line. Values use the shortest decimal that round-trips.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format_scalar(*v)).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Matrix> {
        let mut reader = Reader::new(text);
        let header = reader.expect_line("matrix header \"rows cols\"")?;
        header.expect_len(2, "header fields")?;
        let rows = header.usize_at(0)?;
        let cols = header.usize_at(1)?;
        if rows == 0 || cols == 0 {
            return Err(crate::error::parse_err(
                header.number,
                1,
                "matrix dimensions must be positive",
            ));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = reader.expect_line("matrix row")?;
            line.expect_len(cols, "values")?;
            for k in 0..cols {
                data.push(line.f64_at(k)?);
            }
        }
        reader.expect_end()?;
        Matrix::new(rows, cols, data)
    }
}

pub(crate) fn format_scalar(v: f64) -> String {
    // Normalise negative zero so output is canonical.
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Result of Gauss-Jordan elimination: the first `rank` rows of `reduced`
/// hold the reduced echelon rows, each with a unit entry at its pivot
/// column.
struct Echelon {
    rank: usize,
    pivots: Vec<usize>,
    reduced: Vec<Vec<f64>>,
    cols: usize,
}

fn eliminate(m: &Matrix, tol: &Tolerances) -> Echelon {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<f64>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut used = vec![false; cols];
    let mut pivots = Vec::new();
    let threshold = tol.rank_rel * m.max_abs();
    for k in 0..rows.min(cols) {
        let mut best = (0.0, 0, 0);
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, &v) in row.iter().enumerate() {
                if !used[j] && v.abs() > best.0 {
                    best = (v.abs(), i, j);
                }
            }
        }
        let (mag, pi, pj) = best;
        if mag <= threshold || mag == 0.0 {
            break;
        }
        a.swap(k, pi);
        used[pj] = true;
        pivots.push(pj);
        let p = a[k][pj];
        for v in a[k].iter_mut() {
            *v /= p;
        }
        a[k][pj] = 1.0;
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let f = row[pj];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                row[pj] = 0.0;
            }
        }
    }
    let rank = pivots.len();
    a.truncate(rank);
    Echelon {
        rank,
        pivots,
        reduced: a,
        cols,
    }
}

/// Numerical rank.
pub fn rank(m: &Matrix, tol: &Tolerances) -> usize {
    eliminate(m, tol).rank
}

/// Orthonormal basis of `{v : m·v = 0}` as the columns of a
/// `cols(m) × (cols(m) − rank(m))` matrix (zero columns when the kernel is
/// trivial).
pub fn kernel_basis(m: &Matrix, tol: &Tolerances) -> Matrix {
    let e = eliminate(m, tol);
    let mut is_pivot = vec![false; e.cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let raw: Vec<Vec<f64>> = (0..e.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0.0; e.cols];
            v[f] = 1.0;
            for (row, &p) in e.reduced.iter().zip(&e.pivots) {
                v[p] = -row[f];
            }
            v
        })
        .collect();
    debug_assert_eq!(raw.len(), e.cols - e.rank);
    let basis = orthonormalize(raw, None);
    Matrix::from_columns_unchecked(m.cols(), &basis)
}

/// Modified Gram-Schmidt with a second orthogonalization pass.
///
/// With `drop_rel = Some(t)`, a vector whose norm falls to `t` times its
/// original norm (or below) is discarded as dependent; otherwise every
/// input yields an output vector.
pub fn orthonormalize(vectors: Vec<Vec<f64>>, drop_rel: Option<f64>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        let original = norm(&v);
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&v);
        if let Some(t) = drop_rel {
            if original == 0.0 || n <= t * original {
                continue;
            }
        }
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
        }
        out.push(v);
    }
    out
}

/// Orthonormal basis of the column space of `m`, computed as the
/// orthogonal complement of `ker mᵀ`.
pub fn column_space(m: &Matrix, tol: &Tolerances) -> Matrix {
    let left_null = kernel_basis(&m.transpose(), tol);
    if left_null.cols() == 0 {
        return Matrix::identity(m.rows());
    }
    kernel_basis(&left_null.transpose(), tol)
}

/// Rows of `m` where `mask` is set, order preserved.
pub fn restrict_rows(m: &Matrix, mask: &Mask) -> Result<Matrix> {
    if mask.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "mask of length {} for a matrix with {} rows",
            mask.len(),
            m.rows()
        )));
    }
    let idx = mask.ones_vec();
    if idx.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut out = Matrix::zeros(idx.len(), m.cols());
    for (ii, &i) in idx.iter().enumerate() {
        for j in 0..m.cols() {
            out.set(ii, j, m.get(i, j));
        }
    }
    Ok(out)
}

/// A point of the Grassmannian `Gr(r, R^d)` stored as a `d × r` matrix with
/// orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal within `tol.orth`.
    pub fn from_orthonormal(basis: Matrix, tol: &Tolerances) -> Result<Self> {
        check_dims(basis.rows(), basis.cols())?;
        let gram = basis.transpose().matmul(&basis)?;
        let dev = (0..gram.rows())
            .flat_map(|i| (0..gram.cols()).map(move |j| (i, j)))
            .map(|(i, j)| (gram.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        if dev > tol.orth {
            return Err(Error::InvalidSubspace(format!(
                "basis deviates from orthonormal by {dev:e}"
            )));
        }
        Ok(Self { basis })
    }

    /// Span of the columns of `spanning`, which must have full column rank.
    pub fn from_basis(spanning: &Matrix, tol: &Tolerances) -> Result<Self> {
        check_dims(spanning.rows(), spanning.cols())?;
        let rk = rank(spanning, tol);
        if rk != spanning.cols() {
            return Err(Error::RankDeficient(format!(
                "{} spanning vectors have rank {rk}",
                spanning.cols()
            )));
        }
        let q = orthonormalize(spanning.columns(), None);
        Ok(Self {
            basis: Matrix::from_columns_unchecked(spanning.rows(), &q),
        })
    }

    /// Convenience for one-dimensional subspaces.
    pub fn line(direction: &[f64]) -> Result<Self> {
        Self::from_basis(&Matrix::column_vector(direction)?, &Tolerances::default())
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// `self ⊆ ker Aᵀ` style membership: distance of `x` from the subspace
    /// relative to `‖x‖`.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let q = self.basis.columns();
        projection_residual(&q, x)
    }
}

fn check_dims(d: usize, r: usize) -> Result<()> {
    if r == 0 || r >= d {
        return Err(Error::InvalidSubspace(format!(
            "dimension {r} must satisfy 1 <= r < d = {d}"
        )));
    }
    Ok(())
}

/// `‖x − QQᵀx‖ / ‖x‖` for orthonormal columns `q` (0 for `x = 0`).
pub(crate) fn projection_residual(q: &[Vec<f64>], x: &[f64]) -> f64 {
    let nx = norm(x);
    if nx == 0.0 {
        return 0.0;
    }
    let mut v = x.to_vec();
    for _ in 0..2 {
        for col in q {
            let c = dot(col, &v);
            for (a, b) in v.iter_mut().zip(col) {
                *a -= c * b;
            }
        }
    }
    norm(&v) / nx
}

/// Sine of the largest principal angle between two subspaces of equal
/// dimension. Computed as the spectral norm of `(I − UUᵀ)V`, which keeps
/// full relative accuracy for nearly equal subspaces.
pub fn subspace_distance(u: &Subspace, v: &Subspace) -> Result<f64> {
    if u.ambient_dim() != v.ambient_dim() || u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Gr({}, R^{}) vs Gr({}, R^{})",
            u.dim(),
            u.ambient_dim(),
            v.dim(),
            v.ambient_dim()
        )));
    }
    let ub = u.basis();
    let vb = v.basis();
    let overlap = ub.transpose().matmul(vb)?;
    let mut resid = vb.clone();
    let proj = ub.matmul(&overlap)?;
    for (a, b) in resid.data.iter_mut().zip(&proj.data) {
        *a -= b;
    }
    let gram = resid.transpose().matmul(&resid)?;
    let largest = symmetric_eigenvalues(&gram).into_iter().fold(0.0, f64::max);
    Ok(largest.max(0.0).sqrt().min(1.0))
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub(crate) fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Uniformly distributed subspace of `Gr(r, R^d)`: Gram-Schmidt applied to a
/// `d × r` matrix of independent standard normals.
pub fn random_subspace(d: usize, r: usize, seed: u64) -> Result<Subspace> {
    random_subspace_with(&mut rng::from_seed(seed), d, r)
}

pub fn random_subspace_with<R: Rng + ?Sized>(rng: &mut R, d: usize, r: usize) -> Result<Subspace> {
    check_dims(d, r)?;
    loop {
        let cols: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let q = orthonormalize(cols, Some(1e-8));
        // A rank-deficient Gaussian draw has probability zero; redraw if it
        // ever happens numerically.
        if q.len() == r {
            return Ok(Subspace {
                basis: Matrix::from_columns_unchecked(d, &q),
            });
        }
    }
}

//! Dense kernels used by the block solvers and the diagnostics.
//!
//! Minimum-norm least squares goes through a complete orthogonal
//! decomposition (column-pivoted Householder QR followed by a QR of the
//! leading trapezoid). Singular values come from nalgebra's SVD.

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
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

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
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

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copies the rows listed in `idx`, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.set(i, j, m[(i, j)]);
            }
        }
        out
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// Squared Euclidean distance between two vectors.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn row_sq_norms(j: &DenseMatrix) -> Vec<f64> {
    (0..j.rows()).map(|i| norm_sq(j.row(i))).collect()
}

pub fn frobenius_sq(j: &DenseMatrix) -> f64 {
    norm_sq(j.as_slice())
}

/// Householder reflector `H = I - beta v v^T` with `v[0] = 1` mapping `x`
/// onto a multiple of the first unit vector. Returns `(beta, alpha)` where
/// `alpha` is the resulting leading entry; `x` is overwritten by `v`.
fn householder(x: &mut [f64]) -> (f64, f64) {
    let head = x[0];
    let tail_sq: f64 = norm_sq(&x[1..]);
    if tail_sq == 0.0 {
        x[0] = 1.0;
        return (0.0, head);
    }
    let norm = (head * head + tail_sq).sqrt();
    let alpha = if head > 0.0 { -norm } else { norm };
    let v0 = head - alpha;
    for v in x[1..].iter_mut() {
        *v /= v0;
    }
    x[0] = 1.0;
    let beta = -v0 / alpha;
    (beta, alpha)
}

/// Column-major scratch matrix for the factorizations below.
struct ColMajor {
    rows: usize,
    data: Vec<f64>,
}

impl ColMajor {
    fn from_dense(m: &DenseMatrix) -> Self {
        let mut data = vec![0.0; m.rows() * m.cols()];
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                data[j * m.rows() + i] = m.get(i, j);
            }
        }
        Self {
            rows: m.rows(),
            data,
        }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(a * self.rows + i, b * self.rows + i);
        }
    }
}

/// Applies `I - beta v v^T` (with `v` stored in `refl`) to `target`.
fn apply_reflector(refl: &[f64], beta: f64, target: &mut [f64]) {
    if beta == 0.0 {
        return;
    }
    let s = beta * dot(refl, target);
    for (t, v) in target.iter_mut().zip(refl) {
        *t -= s * v;
    }
}

/// Minimum 2-norm minimizer of `||J d - rhs||`.
///
/// Column-pivoted QR reveals the numerical rank `r` using the tolerance
/// `max(rows, cols) * eps * |R_00|`; a second QR of the transposed leading
/// `r x cols` block then yields the minimum-norm solution.
pub fn min_norm_least_squares(j: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if j.rows() != rhs.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, rhs has length {}",
            j.rows(),
            rhs.len()
        )));
    }
    if !j.is_finite() || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::FactorizationFailure("non-finite input"));
    }
    let (m, n) = (j.rows(), j.cols());
    if m == 0 || n == 0 {
        return Ok(vec![0.0; n]);
    }

    let mut a = ColMajor::from_dense(j);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut betas = Vec::with_capacity(m.min(n));
    let mut diag = Vec::with_capacity(m.min(n));
    let steps = m.min(n);

    for k in 0..steps {
        // exact trailing column norms; the matrices here are small
        let (p, _) = (k..n)
            .map(|c| (c, norm_sq(&a.col(c)[k..])))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        a.swap_cols(k, p);
        perm.swap(k, p);

        let (beta, alpha) = householder(&mut a.col_mut(k)[k..]);
        let refl: Vec<f64> = a.col(k)[k..].to_vec();
        for c in k + 1..n {
            apply_reflector(&refl, beta, &mut a.col_mut(c)[k..]);
        }
        betas.push(beta);
        diag.push(alpha);
    }

    let tol = (m.max(n) as f64) * f64::EPSILON * diag[0].abs();
    let rank = diag.iter().take_while(|d| d.abs() > tol).count();
    if rank == 0 {
        return Ok(vec![0.0; n]);
    }

    // c = Q^T rhs, first `rank` entries
    let mut c = rhs.to_vec();
    for k in 0..rank {
        let mut refl = a.col(k)[k..].to_vec();
        refl[0] = 1.0;
        apply_reflector(&refl, betas[k], &mut c[k..]);
    }
    c.truncate(rank);

    // T = R[0..rank, 0..n]; factor T^T = Z S with S upper triangular rank x rank
    let mut tt = ColMajor {
        rows: n,
        data: vec![0.0; n * rank],
    };
    for i in 0..rank {
        let col = tt.col_mut(i);
        col[i] = diag[i];
        for (jj, slot) in col.iter_mut().enumerate().skip(i + 1) {
            *slot = a.col(jj)[i];
        }
    }
    let mut z_betas = Vec::with_capacity(rank);
    let mut s_diag = Vec::with_capacity(rank);
    for k in 0..rank {
        let (beta, alpha) = householder(&mut tt.col_mut(k)[k..]);
        let refl: Vec<f64> = tt.col(k)[k..].to_vec();
        for cc in k + 1..rank {
            apply_reflector(&refl, beta, &mut tt.col_mut(cc)[k..]);
        }
        z_betas.push(beta);
        s_diag.push(alpha);
    }
    // S[i][j] (i<j) lives at tt.col(j)[i]; solve S^T u = c by forward substitution
    let mut u = vec![0.0; rank];
    for i in 0..rank {
        let mut acc = c[i];
        for (kk, uk) in u.iter().enumerate().take(i) {
            acc -= tt.col(i)[kk] * uk;
        }
        if s_diag[i] == 0.0 {
            return Err(Error::FactorizationFailure("singular triangular factor"));
        }
        u[i] = acc / s_diag[i];
    }
    // y = Z [u; 0]
    let mut y = vec![0.0; n];
    y[..rank].copy_from_slice(&u);
    for k in (0..rank).rev() {
        let mut refl = tt.col(k)[k..].to_vec();
        refl[0] = 1.0;
        apply_reflector(&refl, z_betas[k], &mut y[k..]);
    }

    let mut x = vec![0.0; n];
    for (pos, &col) in perm.iter().enumerate() {
        x[col] = y[pos];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::FactorizationFailure("non-finite solution"));
    }
    Ok(x)
}

/// Moore-Penrose pseudoinverse, assembled column by column from
/// [`min_norm_least_squares`].
pub fn pseudo_inverse(j: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = (j.rows(), j.cols());
    let mut out = DenseMatrix::zeros(n, m);
    let mut e = vec![0.0; m];
    for c in 0..m {
        e[c] = 1.0;
        let col = min_norm_least_squares(j, &e)?;
        for (r, v) in col.into_iter().enumerate() {
            out.set(r, c, v);
        }
        e[c] = 0.0;
    }
    Ok(out)
}

/// Largest singular value and `h2 = inf ||Jx|| / ||x||`.
///
/// `h2` is the smallest singular value when `rows >= cols` and zero for wide
/// matrices, which always have a nontrivial null space.
pub fn singular_extremes(j: &DenseMatrix) -> Result<(f64, f64)> {
    if j.rows() == 0 || j.cols() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if !j.is_finite() {
        return Err(Error::FactorizationFailure("non-finite input"));
    }
    let svd = j
        .to_nalgebra()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or(Error::FactorizationFailure("SVD did not converge"))?;
    let sv = svd.singular_values;
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let h2 = if j.rows() < j.cols() {
        0.0
    } else {
        sv.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok((sigma_max, h2))
}

/// Seeded generator behind every random choice in the crate.
///
/// The stream is ChaCha8 seeded through `SeedableRng::seed_from_u64`; uniform
/// draws use the 53-bit mantissa conversion from `rand`, so a seed yields the
/// same stream on every platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn draw_uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn draw_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform index in `0..n`.
    pub fn draw_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "cannot draw from an empty range");
        self.inner.random_range(0..n)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

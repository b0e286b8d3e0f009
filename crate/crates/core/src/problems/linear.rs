use crate::error::{Error, Result};
use crate::numerics::{dot, norm_sq, DenseMatrix, SeededRng};
use crate::problem::Problem;

/// Affine system `f(x) = A x - b`.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    a: DenseMatrix,
    b: Vec<f64>,
    row_sq: Vec<f64>,
    root: Option<Vec<f64>>,
}

pub fn make_linear(a: DenseMatrix, b: Vec<f64>) -> Result<LinearProblem> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} rows but b has length {}",
            a.rows(),
            b.len()
        )));
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::DimensionMismatch("empty system".into()));
    }
    let row_sq = (0..a.rows()).map(|i| norm_sq(a.row(i))).collect();
    Ok(LinearProblem {
        a,
        b,
        row_sq,
        root: None,
    })
}

impl LinearProblem {
    /// Attaches a known solution.
    pub fn with_root(mut self, root: Vec<f64>) -> Result<Self> {
        if root.len() != self.a.cols() {
            return Err(Error::DimensionMismatch("root length".into()));
        }
        self.root = Some(root);
        Ok(self)
    }

    /// Gaussian `A` and `x*`, with `b = A x*` so the system is consistent.
    pub fn random_consistent(m: usize, n: usize, seed: u64) -> Self {
        let mut rng = SeededRng::new(seed);
        let a = DenseMatrix::from_row_major(m, n, (0..m * n).map(|_| rng.draw_normal()).collect())
            .expect("sized by construction");
        let root: Vec<f64> = (0..n).map(|_| rng.draw_normal()).collect();
        let b = a.matvec(&root);
        make_linear(a, b)
            .and_then(|p| p.with_root(root))
            .expect("sized by construction")
    }

    /// `A = I_n`, `b = (1, ..., n)`.
    pub fn identity(n: usize) -> Self {
        let b: Vec<f64> = (1..=n).map(|v| v as f64).collect();
        make_linear(DenseMatrix::identity(n), b.clone())
            .and_then(|p| p.with_root(b))
            .expect("sized by construction")
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }
}

impl Problem for LinearProblem {
    fn rows(&self) -> usize {
        self.a.rows()
    }

    fn cols(&self) -> usize {
        self.a.cols()
    }

    fn residual_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.a.row(i), x) - self.b[i];
        }
    }

    fn row_gradient_into(&self, i: usize, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(self.a.row(i));
    }

    fn grad_sq_norms_into(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.row_sq);
    }

    fn jacobian(&self, _x: &[f64]) -> DenseMatrix {
        self.a.clone()
    }

    fn is_row_affine(&self, _i: usize) -> bool {
        true
    }

    fn known_root(&self) -> Option<&[f64]> {
        self.root.as_deref()
    }
}

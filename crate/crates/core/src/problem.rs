//! The nonlinear system contract every solver works against.

use crate::numerics::{norm_sq, DenseMatrix};

/// A nonlinear system `f(x) = 0` with `f: R^n -> R^m` and analytic row
/// gradients.
///
/// Rows are indexed from 0. Implementations must be safe to evaluate from
/// several solves at once; all evaluation goes through `&self`.
pub trait Problem: Send + Sync {
    /// Number of equations `m`.
    fn rows(&self) -> usize;

    /// Number of unknowns `n`.
    fn cols(&self) -> usize;

    /// Writes `f(x)` into `out` (length `m`).
    fn residual_into(&self, x: &[f64], out: &mut [f64]);

    /// Writes `grad f_i(x)` into `out` (length `n`).
    fn row_gradient_into(&self, i: usize, x: &[f64], out: &mut [f64]);

    /// Writes `||grad f_i(x)||^2` for every row into `out`.
    ///
    /// The default materializes each gradient; problems with structure
    /// should override it, since the greedy rules call it every iteration.
    fn grad_sq_norms_into(&self, x: &[f64], out: &mut [f64]) {
        let mut g = vec![0.0; self.cols()];
        for (i, slot) in out.iter_mut().enumerate() {
            self.row_gradient_into(i, x, &mut g);
            *slot = norm_sq(&g);
        }
    }

    /// Whether row `i` is affine in `x`, so its linearization is exact.
    fn is_row_affine(&self, _i: usize) -> bool {
        false
    }

    /// A known root, if any. Used for error tracking and diagnostics.
    fn known_root(&self) -> Option<&[f64]> {
        None
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.residual_into(x, &mut out);
        out
    }

    fn row_gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        self.row_gradient_into(i, x, &mut out);
        out
    }

    fn grad_sq_norms(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.grad_sq_norms_into(x, &mut out);
        out
    }

    /// Rows `idx` of the Jacobian, in the given order.
    fn jacobian_rows(&self, idx: &[usize], x: &[f64]) -> DenseMatrix {
        let n = self.cols();
        let mut j = DenseMatrix::zeros(idx.len(), n);
        for (r, &i) in idx.iter().enumerate() {
            self.row_gradient_into(i, x, j.row_mut(r));
        }
        j
    }

    fn jacobian(&self, x: &[f64]) -> DenseMatrix {
        let all: Vec<usize> = (0..self.rows()).collect();
        self.jacobian_rows(&all, x)
    }
}

/// Whether `||f(x*)||^2 < 1e-12` at the problem's known root. Problems
/// without a known root report `false`.
pub fn known_root_check(problem: &dyn Problem) -> bool {
    problem
        .known_root()
        .map(|r| norm_sq(&problem.residual(r)) < 1e-12)
        .unwrap_or(false)
}

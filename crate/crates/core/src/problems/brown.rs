use crate::problem::Problem;

/// Brown almost linear function in `n` unknowns (`m = n`).
///
/// Rows `k < n-1` are `x_k + sum(x) - (n+1)`; the last row is
/// `prod(x) - 1`. The root is the all-ones vector.
#[derive(Debug, Clone)]
pub struct BrownProblem {
    n: usize,
    root: Vec<f64>,
}

impl BrownProblem {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Brown problem needs n >= 1");
        Self {
            n,
            root: vec![1.0; n],
        }
    }

    /// Standard starting point `0.5 * ones(n)`.
    pub fn initial_point(&self) -> Vec<f64> {
        vec![0.5; self.n]
    }

    /// Leave-one-out products `prod_{l != j} x_l`, computed from prefix and
    /// suffix products so zeros in `x` are handled without division.
    fn leave_one_out(x: &[f64], out: &mut [f64]) {
        let mut prefix = 1.0;
        for (o, &v) in out.iter_mut().zip(x) {
            *o = prefix;
            prefix *= v;
        }
        let mut suffix = 1.0;
        for (o, &v) in out.iter_mut().zip(x).rev() {
            *o *= suffix;
            suffix *= v;
        }
    }
}

impl Problem for BrownProblem {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn residual_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let sum: f64 = x.iter().sum();
        let shift = sum - (n as f64 + 1.0);
        for k in 0..n - 1 {
            out[k] = x[k] + shift;
        }
        out[n - 1] = x.iter().product::<f64>() - 1.0;
    }

    fn row_gradient_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        if i + 1 < self.n {
            out.fill(1.0);
            out[i] = 2.0;
        } else {
            Self::leave_one_out(x, out);
        }
    }

    fn grad_sq_norms_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let linear = n as f64 + 3.0;
        out[..n - 1].fill(linear);
        let mut loo = vec![0.0; n];
        Self::leave_one_out(x, &mut loo);
        out[n - 1] = loo.iter().map(|v| v * v).sum();
    }

    fn is_row_affine(&self, i: usize) -> bool {
        i + 1 < self.n
    }

    fn known_root(&self) -> Option<&[f64]> {
        Some(&self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn root_and_half_point() {
        let p = BrownProblem::new(3);
        assert_eq!(p.residual(&[1.0; 3]), vec![0.0; 3]);
        let f = p.residual(&[0.5; 3]);
        assert_relative_eq!(f.as_slice(), [-2.0, -2.0, -0.875].as_slice(), epsilon = 1e-15);
        assert_eq!(p.row_gradient(2, &[0.5; 3]), vec![0.25; 3]);
        assert_eq!(p.row_gradient(0, &[0.5; 3]), vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn product_gradient_with_zero_entry() {
        let p = BrownProblem::new(3);
        assert_eq!(p.row_gradient(2, &[0.0, 2.0, 3.0]), vec![6.0, 0.0, 0.0]);
    }

    #[test]
    fn fast_norms_match_gradients() {
        let p = BrownProblem::new(7);
        let x: Vec<f64> = (0..7).map(|i| 0.3 + 0.2 * i as f64).collect();
        let fast = p.grad_sq_norms(&x);
        for (i, &g2) in fast.iter().enumerate() {
            let g = p.row_gradient(i, &x);
            assert_relative_eq!(g2, g.iter().map(|v| v * v).sum::<f64>(), max_relative = 1e-14);
        }
    }

    #[test]
    fn one_dimensional_case() {
        let p = BrownProblem::new(1);
        assert_eq!(p.residual(&[3.0]), vec![2.0]);
        assert_eq!(p.row_gradient(0, &[3.0]), vec![1.0]);
    }
}

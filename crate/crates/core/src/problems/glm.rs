use std::ops::Range;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::problems::Dataset;

/// `phi_i'(t)` for the logistic loss `ln(1 + exp(-y t))`, i.e. `-y / (1 + exp(y t))`.
pub fn logistic_first_derivative(y: f64, t: f64) -> f64 {
    let s = y * t;
    // 1 / (1 + e^s) without exponentiating a positive argument
    let tail = if s >= 0.0 {
        let e = (-s).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + s.exp())
    };
    -y * tail
}

/// `phi_i''(t) = exp(y t) / (1 + exp(y t))^2` for labels `y = +-1`.
pub fn logistic_second_derivative(y: f64, t: f64) -> f64 {
    let e = (-(y * t).abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// Regularized logistic regression written as a square root-finding
/// problem in `x = [alpha; w]` (`alpha` of length `p`, `w` of length `d`):
///
/// ```text
/// f(x) = [ A alpha / (lambda p) - w       (d coupling rows)
///          alpha + Phi(w)             ]   (p sample rows)
/// ```
///
/// with `Phi(w)_i = phi_i'(a_i^T w)`. Rows `0..d` are the coupling block.
#[derive(Debug, Clone)]
pub struct GlmProblem {
    p: usize,
    d: usize,
    lambda: f64,
    /// Per sample, `(feature, value)` with 0-based features.
    samples: Vec<Vec<(usize, f64)>>,
    /// Per feature, `(sample, value)`.
    features: Vec<Vec<(usize, f64)>>,
    labels: Vec<f64>,
    sample_sq: Vec<f64>,
    feature_sq: Vec<f64>,
}

/// Builds the GLM system; `lambda = 1/p` is the usual choice.
pub fn make_glm(dataset: &Dataset, lambda: f64) -> Result<GlmProblem> {
    let (p, d) = (dataset.p(), dataset.d);
    if p == 0 || d == 0 {
        return Err(Error::DimensionMismatch(format!("GLM needs p, d >= 1 (p={p}, d={d})")));
    }
    if dataset.labels.len() != p {
        return Err(Error::DimensionMismatch("label count differs from sample count".into()));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidConfig(format!("lambda must be positive, got {lambda}")));
    }
    let mut samples = Vec::with_capacity(p);
    let mut features = vec![Vec::new(); d];
    for (i, s) in dataset.samples.iter().enumerate() {
        let mut row = Vec::with_capacity(s.len());
        for &(j, v) in s {
            if j == 0 || j > d {
                return Err(Error::DimensionMismatch(format!("feature index {j} outside 1..={d}")));
            }
            row.push((j - 1, v));
            features[j - 1].push((i, v));
        }
        samples.push(row);
    }
    let sq = |v: &Vec<(usize, f64)>| v.iter().map(|(_, x)| x * x).sum::<f64>();
    let sample_sq = samples.iter().map(sq).collect();
    let feature_sq = features.iter().map(sq).collect();
    Ok(GlmProblem {
        p,
        d,
        lambda,
        samples,
        features,
        labels: dataset.labels.clone(),
        sample_sq,
        feature_sq,
    })
}

impl GlmProblem {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Rows that are linear in `x`.
    pub fn coupling_rows(&self) -> Range<usize> {
        0..self.d
    }

    /// Rows carrying the logistic nonlinearity.
    pub fn sample_rows(&self) -> Range<usize> {
        self.d..self.d + self.p
    }

    fn coupling_scale(&self) -> f64 {
        1.0 / (self.lambda * self.p as f64)
    }

    /// `a_i^T w` for sample `i`.
    fn margin(&self, i: usize, w: &[f64]) -> f64 {
        self.samples[i].iter().map(|&(j, v)| v * w[j]).sum()
    }
}

impl Problem for GlmProblem {
    fn rows(&self) -> usize {
        self.p + self.d
    }

    fn cols(&self) -> usize {
        self.p + self.d
    }

    fn residual_into(&self, x: &[f64], out: &mut [f64]) {
        let (alpha, w) = x.split_at(self.p);
        let scale = self.coupling_scale();
        for j in 0..self.d {
            let a_alpha: f64 = self.features[j].iter().map(|&(i, v)| v * alpha[i]).sum();
            out[j] = scale * a_alpha - w[j];
        }
        for i in 0..self.p {
            let t = self.margin(i, w);
            out[self.d + i] = alpha[i] + logistic_first_derivative(self.labels[i], t);
        }
    }

    fn row_gradient_into(&self, row: usize, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        if row < self.d {
            let scale = self.coupling_scale();
            for &(i, v) in &self.features[row] {
                out[i] = scale * v;
            }
            out[self.p + row] = -1.0;
        } else {
            let i = row - self.d;
            let w = &x[self.p..];
            let curv = logistic_second_derivative(self.labels[i], self.margin(i, w));
            out[i] = 1.0;
            for &(j, v) in &self.samples[i] {
                out[self.p + j] = curv * v;
            }
        }
    }

    fn is_row_affine(&self, i: usize) -> bool {
        i < self.d
    }

    fn grad_sq_norms_into(&self, x: &[f64], out: &mut [f64]) {
        let scale = self.coupling_scale();
        for j in 0..self.d {
            out[j] = scale * scale * self.feature_sq[j] + 1.0;
        }
        let w = &x[self.p..];
        for i in 0..self.p {
            let curv = logistic_second_derivative(self.labels[i], self.margin(i, w));
            out[self.d + i] = 1.0 + curv * curv * self.sample_sq[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toy() -> Dataset {
        Dataset {
            d: 2,
            samples: vec![vec![(1, 1.0), (2, -0.5)], vec![(2, 2.0)], vec![(1, -1.5)]],
            labels: vec![1.0, -1.0, 1.0],
        }
    }

    #[test]
    fn dimensions() {
        let g = make_glm(&toy(), 1.0 / 3.0).unwrap();
        assert_eq!((g.rows(), g.cols()), (5, 5));
        assert_eq!(g.coupling_rows(), 0..2);
        assert_eq!(g.sample_rows(), 2..5);
    }

    #[test]
    fn zero_point_residual() {
        let ds = toy();
        let g = make_glm(&ds, 1.0 / 3.0).unwrap();
        let f = g.residual(&[0.0; 5]);
        assert_eq!(&f[..2], &[0.0, 0.0]);
        for (i, y) in ds.labels.iter().enumerate() {
            assert_relative_eq!(f[2 + i], -y / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn scalar_case() {
        let ds = Dataset {
            d: 1,
            samples: vec![vec![(1, 1.0)]],
            labels: vec![1.0],
        };
        let g = make_glm(&ds, 1.0).unwrap();
        let f = g.residual(&[0.3, 0.0]);
        assert_relative_eq!(f[0], 0.3, epsilon = 1e-15);
        assert_relative_eq!(f[1], -0.2, epsilon = 1e-15);
    }

    #[test]
    fn logistic_derivatives_are_stable() {
        for &t in &[-800.0, -30.0, -1.0, 0.0, 1.0, 30.0, 800.0] {
            for &y in &[-1.0, 1.0] {
                let d1 = logistic_first_derivative(y, t);
                let d2 = logistic_second_derivative(y, t);
                assert!(d1.abs() <= 1.0);
                if t.abs() <= 30.0 {
                    assert!(d1.abs() < 1.0);
                }
                assert!(d2.is_finite() && (0.0..=0.25).contains(&d2));
            }
        }
        assert_relative_eq!(logistic_first_derivative(1.0, 0.0), -0.5);
        assert_relative_eq!(logistic_second_derivative(-1.0, 0.0), 0.25);
        assert_relative_eq!(logistic_first_derivative(-1.0, 2.0), 1.0 / (1.0 + (-2.0f64).exp()), max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(make_glm(&Dataset::default(), 1.0).is_err());
        assert!(make_glm(&toy(), 0.0).is_err());
    }
}

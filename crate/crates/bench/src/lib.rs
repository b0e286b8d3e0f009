//! Shared fixtures for the solver benchmarks.

use cnk::problems::synthetic_dataset;
use cnk::{make_glm, BrownProblem, GlmProblem, LinearProblem};

/// Brown system of size `n` and its standard starting point.
pub fn brown(n: usize) -> (BrownProblem, Vec<f64>) {
    let p = BrownProblem::new(n);
    let x0 = p.initial_point();
    (p, x0)
}

/// Synthetic logistic-regression system with `lambda = 1/p`, started at 0.
pub fn glm(p: usize, d: usize, seed: u64) -> (GlmProblem, Vec<f64>) {
    let g = make_glm(&synthetic_dataset(p, d, seed), 1.0 / p as f64).expect("synthetic data is well formed");
    (g, vec![0.0; p + d])
}

/// Consistent Gaussian system started at 0.
pub fn linear(m: usize, n: usize, seed: u64) -> (LinearProblem, Vec<f64>) {
    (LinearProblem::random_consistent(m, n, seed), vec![0.0; n])
}

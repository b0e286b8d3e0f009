//! Greedy capped thresholds and the index sets they define.
//!
//! The distance rule ranks rows by `|f_i|^2 / ||grad f_i||^2`, the residual
//! rule by `|f_i|^2`. Each rule yields a threshold (`epsilon_k` or
//! `delta_k`), a capped set of rows meeting it, and sampling weights taken
//! from the *other* rule.

use serde::{Deserialize, Serialize};

use crate::config::ThresholdMode;
use crate::error::{Error, Result};
use crate::numerics::SeededRng;

/// Gradients with squared norm below this are treated as zero.
pub const ZERO_GRAD_SQ: f64 = 1e-300;

/// Per-row quantities at one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct RowGeometry {
    pub residual: Vec<f64>,
    pub grad_sq_norms: Vec<f64>,
    pub residual_sq: f64,
    pub jac_fro_sq: f64,
    /// Rows whose gradient is not numerically zero.
    pub active: Vec<usize>,
}

impl RowGeometry {
    pub fn new(residual: Vec<f64>, grad_sq_norms: Vec<f64>) -> Self {
        assert_eq!(residual.len(), grad_sq_norms.len(), "row count mismatch");
        let residual_sq = residual.iter().map(|v| v * v).sum();
        let jac_fro_sq = grad_sq_norms.iter().sum();
        let active = grad_sq_norms
            .iter()
            .enumerate()
            .filter(|(_, &g)| g >= ZERO_GRAD_SQ)
            .map(|(i, _)| i)
            .collect();
        Self {
            residual,
            grad_sq_norms,
            residual_sq,
            jac_fro_sq,
            active,
        }
    }

    pub fn len(&self) -> usize {
        self.residual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residual.is_empty()
    }

    pub fn max_grad_sq(&self) -> f64 {
        self.grad_sq_norms.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_grad_sq(&self) -> f64 {
        self.grad_sq_norms.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Active row maximizing `|f_i|^2 / ||grad f_i||^2`, lowest index on ties.
    pub fn distance_argmax(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for &i in &self.active {
            let r = self.residual[i] * self.residual[i] / self.grad_sq_norms[i];
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((i, r));
            }
        }
        best
    }

    /// Row maximizing `|f_i|^2`, lowest index on ties.
    pub fn residual_argmax(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &f) in self.residual.iter().enumerate() {
            let r = f * f;
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((i, r));
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetKind {
    /// `U_k`, from the distance rule.
    Distance,
    /// `I_k`, from the residual rule.
    Residual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Member rows in ascending order.
    pub set: Vec<usize>,
    pub threshold: f64,
    /// Sampling weights aligned with `set`.
    pub weights: Vec<f64>,
    pub kind: SetKind,
}

impl SelectionResult {
    /// Weights normalized to a probability distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    /// Shifts every member index by `offset`, for sets built on a block of rows.
    pub fn offset(mut self, offset: usize) -> Self {
        for i in &mut self.set {
            *i += offset;
        }
        self
    }
}

/// Threshold `epsilon_k` of the distance rule.
pub fn compute_epsilon(g: &RowGeometry, mode: ThresholdMode) -> Result<f64> {
    if !(g.residual_sq > 0.0) {
        return Err(Error::DegenerateState("zero residual"));
    }
    let (_, max_ratio) = g
        .distance_argmax()
        .ok_or(Error::DegenerateState("every row gradient vanishes"))?;
    let greedy = max_ratio / g.residual_sq;
    Ok(match mode {
        ThresholdMode::Convex(theta) => theta * greedy + (1.0 - theta) / g.jac_fro_sq,
        ThresholdMode::Scaled(xi) => xi * greedy,
    })
}

/// `U_k = { i : |f_i|^2 >= eps ||f||^2 ||grad f_i||^2 }` over active rows,
/// weighted by `|f_i|^2`.
pub fn build_distance_set(g: &RowGeometry, eps: f64) -> Result<SelectionResult> {
    let cut = eps * g.residual_sq;
    // The argmax row always qualifies; keep it when rounding at equality says otherwise.
    let argmax = g.distance_argmax().map(|(i, _)| i);
    let set: Vec<usize> = g
        .active
        .iter()
        .copied()
        .filter(|&i| {
            let f2 = g.residual[i] * g.residual[i];
            f2 >= cut * g.grad_sq_norms[i] || Some(i) == argmax
        })
        .collect();
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let weights: Vec<f64> = set.iter().map(|&i| g.residual[i] * g.residual[i]).collect();
    Ok(SelectionResult {
        set,
        threshold: eps,
        weights,
        kind: SetKind::Distance,
    })
}

/// Threshold `delta_k` of the residual rule, with `m` the number of rows in `g`.
pub fn compute_delta(g: &RowGeometry, mode: ThresholdMode) -> Result<f64> {
    if !(g.residual_sq > 0.0) {
        return Err(Error::DegenerateState("zero residual"));
    }
    let (_, max_f2) = g.residual_argmax().ok_or(Error::DegenerateState("no rows"))?;
    let greedy = max_f2 / g.residual_sq;
    Ok(match mode {
        ThresholdMode::Convex(theta) => theta * greedy + (1.0 - theta) / g.len() as f64,
        ThresholdMode::Scaled(xi) => xi * greedy,
    })
}

/// `I_k = { i : |f_i|^2 >= delta ||f||^2 }`, weighted by
/// `|f_i|^2 / ||grad f_i||^2` (zero for rows with vanishing gradient).
pub fn build_residual_set(g: &RowGeometry, delta: f64) -> Result<SelectionResult> {
    let cut = delta * g.residual_sq;
    let argmax = g.residual_argmax().map(|(i, _)| i);
    let set: Vec<usize> = (0..g.len())
        .filter(|&i| g.residual[i] * g.residual[i] >= cut || Some(i) == argmax)
        .collect();
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let weights: Vec<f64> = set
        .iter()
        .map(|&i| {
            if g.grad_sq_norms[i] >= ZERO_GRAD_SQ {
                g.residual[i] * g.residual[i] / g.grad_sq_norms[i]
            } else {
                0.0
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::AllWeightsZero);
    }
    Ok(SelectionResult {
        set,
        threshold: delta,
        weights,
        kind: SetKind::Residual,
    })
}

/// Draws a position in `weights` with probability proportional to its
/// weight, by inverting the cumulative sum at one uniform variate.
pub fn sample_weighted(weights: &[f64], rng: &mut SeededRng) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::AllWeightsZero);
    }
    let target = rng.draw_uniform() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (pos, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = pos;
            if target < acc {
                return Ok(pos);
            }
        }
    }
    // target landed past the rounded total
    Ok(last_positive)
}

/// Draws a member of `sel.set` with probability `weights[i] / sum(weights)`.
pub fn sample_index(sel: &SelectionResult, rng: &mut SeededRng) -> Result<usize> {
    sample_weighted(&sel.weights, rng).map(|pos| sel.set[pos])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn geom(res: &[f64], grad: &[f64]) -> RowGeometry {
        RowGeometry::new(res.to_vec(), grad.to_vec())
    }

    #[test]
    fn epsilon_examples() {
        let g = geom(&[2.0, 1.0], &[1.0, 1.0]);
        assert_relative_eq!(compute_epsilon(&g, ThresholdMode::Convex(0.5)).unwrap(), 0.65, epsilon = 1e-15);
        assert_relative_eq!(compute_epsilon(&g, ThresholdMode::Scaled(1.0)).unwrap(), 0.8, epsilon = 1e-15);
        let sym = geom(&[1.0, 1.0], &[1.0, 1.0]);
        assert_relative_eq!(compute_epsilon(&sym, ThresholdMode::Convex(0.5)).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn epsilon_degenerate() {
        let zero = geom(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(compute_epsilon(&zero, ThresholdMode::default()), Err(Error::DegenerateState(_))));
        let flat = geom(&[1.0, 1.0], &[0.0, 0.0]);
        assert!(matches!(compute_epsilon(&flat, ThresholdMode::default()), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn distance_set_examples() {
        let g = geom(&[2.0, 1.0], &[1.0, 1.0]);
        let s = build_distance_set(&g, 0.65).unwrap();
        assert_eq!(s.set, vec![0]);
        assert_eq!(s.weights, vec![4.0]);
        assert_eq!(s.kind, SetKind::Distance);

        let sym = geom(&[1.0, 1.0], &[1.0, 1.0]);
        assert_eq!(build_distance_set(&sym, 0.5).unwrap().set, vec![0, 1]);
    }

    #[test]
    fn distance_set_skips_zero_gradient_rows() {
        let g = geom(&[1.0, 5.0, 1.0], &[1.0, 0.0, 1.0]);
        let eps = compute_epsilon(&g, ThresholdMode::default()).unwrap();
        let s = build_distance_set(&g, eps).unwrap();
        assert!(!s.set.contains(&1));
    }

    #[test]
    fn delta_examples() {
        let mode = ThresholdMode::Convex(0.5);
        assert_relative_eq!(compute_delta(&geom(&[2.0, 1.0, 1.0], &[1.0; 3]), mode).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(compute_delta(&geom(&[1.0, 1.0], &[1.0; 2]), mode).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            compute_delta(&geom(&[1.0, 0.0, 0.0, 0.0], &[1.0; 4]), mode).unwrap(),
            0.625,
            epsilon = 1e-15
        );
        assert!(compute_delta(&geom(&[0.0], &[1.0]), mode).is_err());
    }

    #[test]
    fn residual_set_examples() {
        let s = build_residual_set(&geom(&[2.0, 1.0, 1.0], &[1.0; 3]), 0.5).unwrap();
        assert_eq!(s.set, vec![0]);
        let s = build_residual_set(&geom(&[1.0, 1.0], &[1.0; 2]), 0.5).unwrap();
        assert_eq!(s.set, vec![0, 1]);
    }

    #[test]
    fn residual_set_zero_gradient_members() {
        // row 0 qualifies but has no gradient: zero weight, row 1 carries the mass
        let s = build_residual_set(&geom(&[2.0, 2.0], &[0.0, 4.0]), 0.5).unwrap();
        assert_eq!(s.set, vec![0, 1]);
        assert_eq!(s.weights, vec![0.0, 1.0]);
        assert!(matches!(
            build_residual_set(&geom(&[2.0, 0.1], &[0.0, 1.0]), 0.9),
            Err(Error::AllWeightsZero)
        ));
    }

    #[test]
    fn sampling_singleton_and_determinism() {
        let single = SelectionResult {
            set: vec![3],
            threshold: 0.0,
            weights: vec![4.0],
            kind: SetKind::Distance,
        };
        let mut rng = SeededRng::new(1);
        for _ in 0..100 {
            assert_eq!(sample_index(&single, &mut rng).unwrap(), 3);
        }

        let pair = SelectionResult {
            set: vec![1, 2],
            threshold: 0.0,
            weights: vec![1.0, 1.0],
            kind: SetKind::Distance,
        };
        let mut a = SeededRng::new(8);
        let mut b = SeededRng::new(8);
        let da: Vec<usize> = (0..200).map(|_| sample_index(&pair, &mut a).unwrap()).collect();
        let db: Vec<usize> = (0..200).map(|_| sample_index(&pair, &mut b).unwrap()).collect();
        assert_eq!(da, db);
    }

    #[test]
    fn sampling_frequency() {
        let sel = SelectionResult {
            set: vec![1, 2],
            threshold: 0.0,
            weights: vec![3.0, 1.0],
            kind: SetKind::Residual,
        };
        let mut rng = SeededRng::new(2024);
        let draws = 100_000;
        let hits = (0..draws).filter(|_| sample_index(&sel, &mut rng).unwrap() == 1).count();
        let freq = hits as f64 / draws as f64;
        assert!((0.74..=0.76).contains(&freq), "frequency {freq}");
        // chi-square with one degree of freedom, 99.9% quantile 10.83
        let (e1, e2) = (0.75 * draws as f64, 0.25 * draws as f64);
        let (o1, o2) = (hits as f64, (draws - hits) as f64);
        let chi2 = (o1 - e1).powi(2) / e1 + (o2 - e2).powi(2) / e2;
        assert!(chi2 < 10.83, "chi2 {chi2}");
    }

    #[test]
    fn sampling_rejects_zero_mass() {
        let sel = SelectionResult {
            set: vec![0],
            threshold: 0.0,
            weights: vec![0.0],
            kind: SetKind::Residual,
        };
        assert_eq!(sample_index(&sel, &mut SeededRng::new(0)), Err(Error::AllWeightsZero));
    }

    fn state() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..12).prop_flat_map(|m| {
            (
                prop::collection::vec(-10.0f64..10.0, m),
                prop::collection::vec(1e-3f64..10.0, m),
            )
        })
    }

    proptest! {
        #[test]
        fn scaled_mode_is_nonempty((res, grad) in state(), xi in 0.01f64..=1.0) {
            let g = RowGeometry::new(res, grad);
            prop_assume!(g.residual_sq > 0.0);
            let mode = ThresholdMode::Scaled(xi);
            let u = build_distance_set(&g, compute_epsilon(&g, mode).unwrap()).unwrap();
            let i = build_residual_set(&g, compute_delta(&g, mode).unwrap()).unwrap();
            prop_assert!(u.set.contains(&g.distance_argmax().unwrap().0));
            prop_assert!(i.set.contains(&g.residual_argmax().unwrap().0));
        }

        #[test]
        fn membership_matches_defining_inequality((res, grad) in state(), theta in 0.0f64..=1.0) {
            let g = RowGeometry::new(res, grad);
            prop_assume!(g.residual_sq > 0.0);
            let mode = ThresholdMode::Convex(theta);
            let eps = compute_epsilon(&g, mode).unwrap();
            let u = build_distance_set(&g, eps).unwrap();
            let argmax = g.distance_argmax().unwrap().0;
            for &i in &u.set {
                let f2 = g.residual[i] * g.residual[i];
                prop_assert!(i == argmax || f2 >= eps * g.residual_sq * g.grad_sq_norms[i]);
            }
            for i in 0..g.len() {
                let f2 = g.residual[i] * g.residual[i];
                if f2 >= eps * g.residual_sq * g.grad_sq_norms[i] {
                    prop_assert!(u.set.contains(&i));
                }
            }
        }
    }
}

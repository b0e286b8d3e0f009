//! Theory-side quantities: tangential cone estimates, convergence factors
//! and point-wise checks of the supporting inequalities.
//!
//! The cone constant `eta` is never assumed. It is estimated as a sampled
//! supremum over a ball, so it is a lower bound of the true supremum on that
//! ball and every factor computed from it is conditional on that region.

use serde::{Deserialize, Serialize};

use crate::config::{MethodKind, SolverConfig};
use crate::error::{Error, Result};
use crate::numerics::{dist_sq, dot, norm_sq, pseudo_inverse, singular_extremes, DenseMatrix, SeededRng};
use crate::problem::Problem;
use crate::selection::{compute_delta, compute_epsilon, RowGeometry, ZERO_GRAD_SQ};
use crate::solvers::{block_update, kaczmarz_step, solve_glm_hybrid_observed, solve_observed, StepView};
use crate::problems::GlmProblem;
use crate::trace::SolveTrace;

/// Differences `|f_i(x1) - f_i(x2)|` at or below this are skipped.
const MIN_DIFFERENCE: f64 = 1e-12;

/// Relative slack applied when counting inequality violations.
const CHECK_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    /// Sampled supremum of the cone ratio per row.
    pub eta_per_row: Vec<f64>,
    pub eta: f64,
    pub sample_count: usize,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Rows for which no sampled pair gave a usable ratio.
    pub degenerate_rows: Vec<usize>,
}

impl EtaEstimate {
    /// `eta < 1/2`, the regime where the factors below are meaningful.
    pub fn is_valid(&self) -> bool {
        self.eta < 0.5
    }
}

/// Uniform draw from the ball of `radius` around `center`.
fn draw_in_ball(center: &[f64], radius: f64, rng: &mut SeededRng) -> Vec<f64> {
    let n = center.len();
    let mut dir: Vec<f64> = (0..n).map(|_| rng.draw_normal()).collect();
    let len = norm_sq(&dir).sqrt();
    let r = radius * rng.draw_uniform().powf(1.0 / n as f64);
    for (d, c) in dir.iter_mut().zip(center) {
        *d = c + r * *d / len;
    }
    dir
}

/// Estimates the per-row cone constants
/// `|f_i(x1) - f_i(x2) - grad f_i(x1)^T (x1 - x2)| / |f_i(x1) - f_i(x2)|`
/// as the maximum over `pairs` point pairs drawn uniformly from the ball.
///
/// Rows the problem declares affine are exactly 0 and are not sampled.
/// Rows that never see a difference above `1e-12` are listed in
/// `degenerate_rows` with value 0; if that happens to every row the call
/// fails with [`Error::DegenerateRegion`].
pub fn estimate_eta(
    problem: &dyn Problem,
    center: &[f64],
    radius: f64,
    pairs: usize,
    rng: &mut SeededRng,
) -> Result<EtaEstimate> {
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!("radius must be positive, got {radius}")));
    }
    if pairs == 0 {
        return Err(Error::InvalidConfig("need at least one pair".into()));
    }
    if center.len() != problem.cols() {
        return Err(Error::DimensionMismatch("center length".into()));
    }
    let m = problem.rows();
    let nonlinear: Vec<usize> = (0..m).filter(|&i| !problem.is_row_affine(i)).collect();
    let mut eta_per_row = vec![0.0; m];
    let mut valid = vec![false; m];
    for i in 0..m {
        valid[i] = problem.is_row_affine(i);
    }
    let mut grad = vec![0.0; problem.cols()];
    for _ in 0..pairs {
        let x1 = draw_in_ball(center, radius, rng);
        let x2 = draw_in_ball(center, radius, rng);
        if nonlinear.is_empty() {
            continue;
        }
        let f1 = problem.residual(&x1);
        let f2 = problem.residual(&x2);
        let step: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a - b).collect();
        for &i in &nonlinear {
            let diff = f1[i] - f2[i];
            if diff.abs() <= MIN_DIFFERENCE {
                continue;
            }
            problem.row_gradient_into(i, &x1, &mut grad);
            let ratio = (diff - dot(&grad, &step)).abs() / diff.abs();
            eta_per_row[i] = f64::max(eta_per_row[i], ratio);
            valid[i] = true;
        }
    }
    let degenerate_rows: Vec<usize> = (0..m).filter(|&i| !valid[i]).collect();
    if degenerate_rows.len() == m {
        return Err(Error::DegenerateRegion(degenerate_rows));
    }
    let eta = eta_per_row.iter().cloned().fold(0.0, f64::max);
    Ok(EtaEstimate {
        eta_per_row,
        eta,
        sample_count: pairs,
        center: center.to_vec(),
        radius,
        degenerate_rows,
    })
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..0.5).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidEta(eta))
    }
}

/// `1 - (1 - 2 eta) / (1 + eta^2) * eps_k * h2^2`.
pub fn factor_dr_cnk(eps_k: f64, h2: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(1.0 - (1.0 - 2.0 * eta) / (1.0 + eta * eta) * eps_k * h2 * h2)
}

/// `1 - (1 - 2 eta) / (1 + eta^2) * delta_k * h2^2 / max_i ||grad f_i||^2`.
pub fn factor_rd_cnk(delta_k: f64, h2: f64, max_grad_sq: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(1.0 - (1.0 - 2.0 * eta) / (1.0 + eta * eta) * delta_k * h2 * h2 / max_grad_sq)
}

/// Reference factor shared by NRK and NURK:
/// `1 - (1 - 2 eta) / (1 + eta)^2 * h2^2 / (||f'||_F^2 m)`.
pub fn factor_nrk(h2: f64, fro_sq: f64, m: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(1.0 - (1.0 - 2.0 * eta) / ((1.0 + eta) * (1.0 + eta)) * h2 * h2 / (fro_sq * m as f64))
}

/// One-step factor of the block methods:
/// `1 - a * g * |tau| * t * h2^2 / (1 + eta^2)` where `a` is alpha (beta),
/// `t` is `eps_k` (`delta_k`), and `g` is `min_i ||grad f_i||^2` for the
/// distance rule and 1 for the residual rule.
pub fn factor_block(
    alpha_or_beta: f64,
    set_size: usize,
    eps_or_delta: f64,
    h2: f64,
    grad_scale: f64,
    eta: f64,
) -> Result<f64> {
    check_eta(eta)?;
    if !(alpha_or_beta > 0.0) {
        return Err(Error::HypothesisViolated(alpha_or_beta));
    }
    Ok(1.0 - alpha_or_beta * grad_scale * set_size as f64 * eps_or_delta * h2 * h2 / (1.0 + eta * eta))
}

/// `h2^2(J^+) - 2 eta sigma_max^2(J^+)` for a block Jacobian `J`.
pub fn block_alpha(jac: &DenseMatrix, eta: f64) -> Result<f64> {
    let pinv = pseudo_inverse(jac)?;
    let (smax, h2) = singular_extremes(&pinv)?;
    Ok(h2 * h2 - 2.0 * eta * smax * smax)
}

/// Per-iteration theory quantities for one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// `h2(f'(x_k))`.
    pub h2: f64,
    pub max_grad_sq: f64,
    pub min_grad_sq: f64,
    pub fro_sq: f64,
    /// Size of the capped set (or of the update's row set).
    pub set_size: usize,
    /// alpha (distance rule) or beta (residual rule) for block methods.
    pub alpha_or_beta: Option<f64>,
    pub rho_dr: f64,
    pub rho_rd: f64,
    pub rho_nrk: f64,
    /// Factor of the running method; `None` for block methods whose
    /// hypothesis fails at this state and for NK.
    pub rho: Option<f64>,
    /// `E_k ||x_{k+1} - x*||^2 / ||x_k - x*||^2` summed exactly over the
    /// selection distribution (single-row methods).
    pub expected_ratio: Option<f64>,
    /// Realized `||x_{k+1} - x*||^2 / ||x_k - x*||^2`.
    pub measured_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub method: MethodKind,
    pub eta: f64,
    /// False when the thresholds were not the default `Convex(0.5)`; the
    /// factor formulas then use whatever `eps_k`/`delta_k` the mode produced.
    pub default_thresholds: bool,
    pub entries: Vec<FactorEntry>,
}

impl FactorReport {
    /// Iterations where `rho_dr < rho_nrk` or `rho_rd < rho_nrk` fails.
    pub fn ordering_violations(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| !(e.rho_dr < e.rho_nrk && e.rho_rd < e.rho_nrk))
            .count()
    }

    /// Block steps with a positive alpha/beta whose factor is not below 1 or
    /// whose measured ratio exceeds the factor by more than `slack`.
    pub fn block_bound_violations(&self, slack: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| e.alpha_or_beta.is_some_and(|a| a > 0.0))
            .filter(|e| match (e.rho, e.measured_ratio) {
                (Some(rho), Some(meas)) => !(rho < 1.0) || meas > rho + slack,
                (Some(rho), None) => !(rho < 1.0),
                _ => true,
            })
            .count()
    }
}

fn is_distance_rule(method: MethodKind) -> bool {
    matches!(method, MethodKind::DrCnk | MethodKind::DbCnk | MethodKind::GlmHybridDb)
}

struct FactorBuilder<'a> {
    problem: &'a dyn Problem,
    method: MethodKind,
    config: &'a SolverConfig,
    eta: f64,
    entries: Vec<FactorEntry>,
    error: Option<Error>,
}

impl FactorBuilder<'_> {
    fn on_step(&mut self, v: &StepView<'_>) {
        if self.error.is_some() {
            return;
        }
        match self.entry(v) {
            Ok(e) => self.entries.push(e),
            Err(e) => self.error = Some(e),
        }
    }

    fn entry(&self, v: &StepView<'_>) -> Result<FactorEntry> {
        let p = self.problem;
        let m = p.rows();
        let geom = RowGeometry::new(v.residual.to_vec(), p.grad_sq_norms(v.x));
        let mode = self.config.threshold;
        let epsilon = compute_epsilon(&geom, mode)?;
        let delta = compute_delta(&geom, mode)?;
        let (_, h2) = singular_extremes(&p.jacobian(v.x))?;
        let max_grad_sq = geom.max_grad_sq();
        let min_grad_sq = geom.min_grad_sq();
        let fro_sq = geom.jac_fro_sq;
        let eta = self.eta;
        let rho_dr = factor_dr_cnk(epsilon, h2, eta)?;
        let rho_rd = factor_rd_cnk(delta, h2, max_grad_sq, eta)?;
        let rho_nrk = factor_nrk(h2, fro_sq, m, eta)?;
        let set_size = v.selection.map_or(v.selected.len(), |s| s.set.len());
        let root = p.known_root();
        let measured_ratio = root.map(|r| dist_sq(v.x_next, r) / dist_sq(v.x, r));

        let mut alpha_or_beta = None;
        let rho = match self.method {
            MethodKind::DrCnk => Some(rho_dr),
            MethodKind::RdCnk => Some(rho_rd),
            MethodKind::Nrk | MethodKind::Nurk => Some(rho_nrk),
            MethodKind::Nk => None,
            MethodKind::DbCnk | MethodKind::RbCnk | MethodKind::GlmHybridDb | MethodKind::GlmHybridRb => {
                let jac = p.jacobian_rows(v.selected, v.x);
                let a = block_alpha(&jac, eta)?;
                alpha_or_beta = Some(a);
                let (thresh, scale) = if is_distance_rule(self.method) {
                    (epsilon, min_grad_sq)
                } else {
                    (delta, 1.0)
                };
                match factor_block(a, set_size, thresh, h2, scale, eta) {
                    Ok(f) => Some(f),
                    Err(Error::HypothesisViolated(_)) => None,
                    Err(e) => return Err(e),
                }
            }
        };

        let expected_ratio = match (root, self.method.is_block()) {
            (Some(r), false) => Some(self.expected_ratio(v, &geom, r)?),
            _ => None,
        };

        Ok(FactorEntry {
            k: v.k,
            epsilon,
            delta,
            h2,
            max_grad_sq,
            min_grad_sq,
            fro_sq,
            set_size,
            alpha_or_beta,
            rho_dr,
            rho_rd,
            rho_nrk,
            rho,
            expected_ratio,
            measured_ratio,
        })
    }

    /// Exact conditional expectation of the error ratio over the row
    /// distribution the method samples from at this state.
    fn expected_ratio(&self, v: &StepView<'_>, geom: &RowGeometry, root: &[f64]) -> Result<f64> {
        let m = geom.len();
        let dist: Vec<(usize, f64)> = match (self.method, v.selection) {
            (MethodKind::DrCnk | MethodKind::RdCnk, Some(sel)) => {
                sel.set.iter().copied().zip(sel.probabilities()).collect()
            }
            (MethodKind::Nrk, _) => geom
                .residual
                .iter()
                .enumerate()
                .map(|(i, f)| (i, f * f / geom.residual_sq))
                .collect(),
            (MethodKind::Nurk, _) => (0..m).map(|i| (i, 1.0 / m as f64)).collect(),
            _ => v.selected.iter().map(|&i| (i, 1.0)).collect(),
        };
        let base = dist_sq(v.x, root);
        let mut acc = 0.0;
        for (i, prob) in dist {
            if prob == 0.0 {
                continue;
            }
            let grad = self.problem.row_gradient(i, v.x);
            let next = kaczmarz_step(v.x, v.residual[i], &grad)?;
            acc += prob * dist_sq(&next, root);
        }
        Ok(acc / base)
    }
}

/// Solves with `config` while computing the per-iteration factors under the
/// cone constant `eta`.
pub fn factor_report(
    problem: &dyn Problem,
    x0: &[f64],
    config: &SolverConfig,
    eta: f64,
) -> Result<(SolveTrace, FactorReport)> {
    check_eta(eta)?;
    let mut builder = FactorBuilder {
        problem,
        method: config.method,
        config,
        eta,
        entries: Vec::new(),
        error: None,
    };
    let trace = solve_observed(problem, x0, config, &mut |v: &StepView<'_>| builder.on_step(v))?;
    finish(builder, trace, config, eta)
}

/// [`factor_report`] for the GLM hybrid scheme. The theory quantities refer
/// to the full system at `x_k`; `measured_ratio` needs a known root and is
/// otherwise absent.
pub fn factor_report_glm_hybrid(
    glm: &GlmProblem,
    x0: &[f64],
    config: &SolverConfig,
    eta: f64,
) -> Result<(SolveTrace, FactorReport)> {
    check_eta(eta)?;
    let mut builder = FactorBuilder {
        problem: glm,
        method: config.method,
        config,
        eta,
        entries: Vec::new(),
        error: None,
    };
    let trace = solve_glm_hybrid_observed(glm, x0, config, &mut |v: &StepView<'_>| builder.on_step(v))?;
    finish(builder, trace, config, eta)
}

fn finish(
    builder: FactorBuilder<'_>,
    trace: SolveTrace,
    config: &SolverConfig,
    eta: f64,
) -> Result<(SolveTrace, FactorReport)> {
    if let Some(e) = builder.error {
        return Err(e);
    }
    Ok((
        trace,
        FactorReport {
            method: config.method,
            eta,
            default_thresholds: config.threshold.is_default(),
            entries: builder.entries,
        },
    ))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCount {
    pub checked: usize,
    pub violations: usize,
}

impl InequalityCount {
    fn tally(&mut self, holds: bool) {
        self.checked += 1;
        if !holds {
            self.violations += 1;
        }
    }
}

/// Violation counts for the three supporting inequalities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    /// Single-row decrease: `||x' - x*||^2 <= ||x - x*||^2 - (1 - 2 eta) f_i^2 / ||grad f_i||^2`.
    pub single_step_decrease: InequalityCount,
    /// `||f_tau(x1) - f_tau(x2)||^2 >= ||f'_tau(x1)(x1 - x2)||^2 / (1 + eta^2)`.
    pub residual_lower_bound: InequalityCount,
    /// Block decrease: `||x' - x*||^2 <= ||x - x*||^2 - (h2^2(J^+) - 2 eta sigma_max^2(J^+)) ||f_tau||^2`.
    pub block_step_decrease: InequalityCount,
}

impl LemmaReport {
    pub fn total_violations(&self) -> usize {
        self.single_step_decrease.violations
            + self.residual_lower_bound.violations
            + self.block_step_decrease.violations
    }
}

/// Evaluates both sides of the three inequalities.
///
/// For each pair `(x1, x2)`: the single-row decrease is checked at `x1` for
/// every row; the residual lower bound for every set in `tau_sets`; the
/// block decrease at `x1` for every set. The decrease checks need a known
/// root and are skipped without one. Violations are counted with a relative
/// slack of `1e-10`.
pub fn check_lemma_inequalities(
    problem: &dyn Problem,
    x_pairs: &[(Vec<f64>, Vec<f64>)],
    tau_sets: &[Vec<usize>],
    eta: f64,
) -> Result<LemmaReport> {
    let mut report = LemmaReport::default();
    let root = problem.known_root();
    let m = problem.rows();
    for (x1, x2) in x_pairs {
        let f1 = problem.residual(x1);
        let f2 = problem.residual(x2);

        if let Some(r) = root {
            let base = dist_sq(x1, r);
            for i in 0..m {
                let grad = problem.row_gradient(i, x1);
                let g2 = norm_sq(&grad);
                if g2 < ZERO_GRAD_SQ {
                    continue;
                }
                let next = kaczmarz_step(x1, f1[i], &grad)?;
                let lhs = dist_sq(&next, r);
                let gain = (1.0 - 2.0 * eta) * f1[i] * f1[i] / g2;
                let rhs = base - gain;
                report
                    .single_step_decrease
                    .tally(lhs <= rhs + CHECK_SLACK * (base + gain.abs()) + f64::MIN_POSITIVE);
            }
        }

        let step: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a - b).collect();
        for tau in tau_sets {
            let jac = problem.jacobian_rows(tau, x1);
            let lin = norm_sq(&jac.matvec(&step));
            let diff: f64 = tau.iter().map(|&i| (f1[i] - f2[i]).powi(2)).sum();
            let rhs = lin / (1.0 + eta * eta);
            report
                .residual_lower_bound
                .tally(diff >= rhs - CHECK_SLACK * (diff + rhs) - f64::MIN_POSITIVE);

            if let Some(r) = root {
                let f_tau: Vec<f64> = tau.iter().map(|&i| f1[i]).collect();
                let next = block_update(x1, &jac, &f_tau)?;
                let a = block_alpha(&jac, eta)?;
                let base = dist_sq(x1, r);
                let gain = a * norm_sq(&f_tau);
                let lhs = dist_sq(&next, r);
                report
                    .block_step_decrease
                    .tally(lhs <= base - gain + CHECK_SLACK * (base + gain.abs()) + f64::MIN_POSITIVE);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{BrownProblem, LinearProblem};
    use approx::assert_relative_eq;

    /// `f(x) = x^2 - 100`, root at 10.
    struct Square;

    impl Problem for Square {
        fn rows(&self) -> usize {
            1
        }
        fn cols(&self) -> usize {
            1
        }
        fn residual_into(&self, x: &[f64], out: &mut [f64]) {
            out[0] = x[0] * x[0] - 100.0;
        }
        fn row_gradient_into(&self, _i: usize, x: &[f64], out: &mut [f64]) {
            out[0] = 2.0 * x[0];
        }
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor_dr_cnk(1.0, 1.0, 0.0).unwrap(), 0.0);
        let rho = factor_dr_cnk(2.0, 0.1f64.sqrt(), 0.25).unwrap();
        assert_relative_eq!(rho, 1.0 - 0.5 / 1.0625 * 0.2, max_relative = 1e-14);
        assert_relative_eq!(rho, 0.905_882_352_941_176_5, max_relative = 1e-14);
        assert!(matches!(factor_dr_cnk(1.0, 1.0, 0.5), Err(Error::InvalidEta(_))));
        assert!(matches!(factor_nrk(1.0, 1.0, 1, -0.1), Err(Error::InvalidEta(_))));
    }

    #[test]
    fn block_factor_identity() {
        let a = block_alpha(&DenseMatrix::identity(3), 0.0).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-14);
        let f = factor_block(a, 3, 0.2, 1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(f, 1.0 - 3.0 * 0.2, epsilon = 1e-14);
        assert!(matches!(
            factor_block(-0.1, 3, 0.2, 1.0, 1.0, 0.0),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn eta_of_affine_system_is_zero() {
        let p = LinearProblem::random_consistent(8, 4, 1);
        let est = estimate_eta(&p, &[0.0; 4], 1.0, 100, &mut SeededRng::new(0)).unwrap();
        assert_eq!(est.eta, 0.0);
        assert!(est.degenerate_rows.is_empty());
    }

    #[test]
    fn eta_of_square_matches_closed_form() {
        // ratio is |x1 - x2| / |x1 + x2|; on [9, 11] its sup is 2/20
        let est = estimate_eta(&Square, &[10.0], 1.0, 5000, &mut SeededRng::new(4)).unwrap();
        assert!(est.eta <= 0.1 + 1e-12);
        assert!(est.eta > 0.09);
        // a wide ball around the origin region pushes it past 1/2
        let wide = estimate_eta(&Square, &[10.0], 15.0, 5000, &mut SeededRng::new(4)).unwrap();
        assert!(wide.eta > 0.5);
    }

    #[test]
    fn eta_is_monotone_in_sample_count() {
        let brown = BrownProblem::new(4);
        let mut prev = 0.0;
        for pairs in [10, 100, 1000] {
            let est = estimate_eta(&brown, &[1.0; 4], 0.1, pairs, &mut SeededRng::new(12)).unwrap();
            assert!(est.eta >= prev);
            prev = est.eta;
        }
    }

    #[test]
    fn eta_rejects_bad_region() {
        let brown = BrownProblem::new(2);
        assert!(estimate_eta(&brown, &[1.0; 2], 0.0, 10, &mut SeededRng::new(0)).is_err());
        assert!(estimate_eta(&brown, &[1.0; 2], 1.0, 0, &mut SeededRng::new(0)).is_err());
    }

    #[test]
    fn lemmas_hold_on_linear_systems() {
        let p = LinearProblem::random_consistent(12, 5, 3);
        let mut rng = SeededRng::new(5);
        let pairs: Vec<_> = (0..50)
            .map(|_| {
                let a: Vec<f64> = (0..5).map(|_| rng.draw_normal()).collect();
                let b: Vec<f64> = (0..5).map(|_| rng.draw_normal()).collect();
                (a, b)
            })
            .collect();
        let taus = vec![vec![0], vec![1, 4, 7], (0..12).collect()];
        let rep = check_lemma_inequalities(&p, &pairs, &taus, 0.0).unwrap();
        assert_eq!(rep.total_violations(), 0);
        assert_eq!(rep.single_step_decrease.checked, 50 * 12);
        assert_eq!(rep.block_step_decrease.checked, 50 * 3);
    }

    #[test]
    fn zero_eta_on_nonlinear_problem_is_caught() {
        let pairs: Vec<_> = [(9.0, 11.0), (12.0, 8.0), (10.5, 9.5)]
            .iter()
            .map(|&(a, b)| (vec![a], vec![b]))
            .collect();
        let rep = check_lemma_inequalities(&Square, &pairs, &[vec![0]], 0.0).unwrap();
        assert!(rep.residual_lower_bound.violations > 0);
    }
}

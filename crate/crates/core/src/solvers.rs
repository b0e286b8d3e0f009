//! Row-action updates and the method drivers.
//!
//! Every driver evaluates the full residual at the top of each iteration,
//! records it, applies the stopping rule, picks rows according to the
//! configured [`MethodKind`] and applies either the single-row projection
//! ([`kaczmarz_step`]) or the block pseudoinverse projection
//! ([`block_step`]).

use std::time::Instant;

use crate::config::{check_stop, MethodKind, SolverConfig, StopDecision, ThresholdMode};
use crate::error::{Error, Result};
use crate::numerics::{dist_sq, min_norm_least_squares, norm_sq, DenseMatrix, SeededRng};
use crate::problem::Problem;
use crate::problems::GlmProblem;
use crate::selection::{
    build_distance_set, build_residual_set, compute_delta, compute_epsilon, sample_index,
    sample_weighted, RowGeometry, SelectionResult, ZERO_GRAD_SQ,
};
use crate::trace::{IterationRecord, SolveStatus, SolveTrace};

/// Projects `x` onto the linearization `f_i + grad_i^T (y - x) = 0`.
pub fn kaczmarz_step(x: &[f64], f_i: f64, grad_i: &[f64]) -> Result<Vec<f64>> {
    let g2 = norm_sq(grad_i);
    if !(g2 >= ZERO_GRAD_SQ) {
        return Err(Error::ZeroGradient);
    }
    let s = f_i / g2;
    Ok(x.iter().zip(grad_i).map(|(xi, gi)| xi - s * gi).collect())
}

/// `x - J^+ f` for a block Jacobian `J` and block residual `f`.
pub fn block_update(x: &[f64], jac: &DenseMatrix, f: &[f64]) -> Result<Vec<f64>> {
    let delta = min_norm_least_squares(jac, f)?;
    Ok(x.iter().zip(&delta).map(|(a, b)| a - b).collect())
}

/// `x - (f'_tau(x))^+ f_tau(x)`: projection onto the joint linearization of
/// the rows in `tau`.
pub fn block_step(x: &[f64], tau: &[usize], problem: &dyn Problem) -> Result<Vec<f64>> {
    if tau.is_empty() {
        return Err(Error::EmptySet);
    }
    let f = problem.residual(x);
    let f_tau: Vec<f64> = tau.iter().map(|&i| f[i]).collect();
    block_update(x, &problem.jacobian_rows(tau, x), &f_tau)
}

/// Capped set for `rule` over the rows described by `geom`.
fn greedy_set(geom: &RowGeometry, rule: MethodKind, mode: ThresholdMode) -> Result<SelectionResult> {
    match rule {
        MethodKind::DrCnk | MethodKind::DbCnk | MethodKind::GlmHybridDb => {
            build_distance_set(geom, compute_epsilon(geom, mode)?)
        }
        _ => build_residual_set(geom, compute_delta(geom, mode)?),
    }
}

/// One update as seen by a [`solve_observed`] observer.
#[derive(Debug)]
pub struct StepView<'a> {
    pub k: usize,
    pub x: &'a [f64],
    pub x_next: &'a [f64],
    /// `f(x_k)`.
    pub residual: &'a [f64],
    /// The capped set, for greedy methods.
    pub selection: Option<&'a SelectionResult>,
    /// Rows actually used in the update.
    pub selected: &'a [usize],
}

struct Clock {
    start: Option<Instant>,
}

impl Clock {
    fn new(on: bool) -> Self {
        Self {
            start: on.then(Instant::now),
        }
    }

    fn elapsed(&self) -> f64 {
        self.start.map_or(0.0, |s| s.elapsed().as_secs_f64())
    }
}

struct TraceBuilder<'a> {
    root: Option<&'a [f64]>,
    clock: Clock,
    records: Vec<IterationRecord>,
}

impl<'a> TraceBuilder<'a> {
    fn new(config: &SolverConfig, root: Option<&'a [f64]>) -> Self {
        Self {
            root: if config.record_error { root } else { None },
            clock: Clock::new(config.timing),
            records: Vec::new(),
        }
    }

    fn record(&mut self, k: usize, residual_sq: f64, x: &[f64], selected: Vec<usize>, set_size: usize) {
        let error_sq = self.root.map(|r| dist_sq(x, r));
        self.records.push(IterationRecord {
            k,
            residual_sq,
            selected,
            set_size,
            elapsed: self.clock.elapsed(),
            error_sq,
            coupling_residual_sq: None,
        });
    }

    fn finish(self, status: SolveStatus, x: Vec<f64>, k: usize, breakdown: Option<String>) -> SolveTrace {
        let total_seconds = self.clock.elapsed();
        SolveTrace {
            records: self.records,
            status,
            final_x: x,
            total_iterations: k,
            total_seconds,
            breakdown,
        }
    }
}

fn check_inputs(problem: &dyn Problem, x0: &[f64], config: &SolverConfig) -> Result<()> {
    config.validate()?;
    if x0.len() != problem.cols() {
        return Err(Error::DimensionMismatch(format!(
            "x0 has length {}, problem has {} unknowns",
            x0.len(),
            problem.cols()
        )));
    }
    Ok(())
}

/// Runs the configured method from `x0`. See [`solve_observed`].
pub fn solve(problem: &dyn Problem, x0: &[f64], config: &SolverConfig) -> Result<SolveTrace> {
    solve_observed(problem, x0, config, &mut |_: &StepView<'_>| {})
}

/// Runs the configured method from `x0`, calling `observer` after every
/// update.
///
/// Invalid configurations and GLM-hybrid methods are rejected with an
/// error. Breakdowns during the iteration (vanishing gradients, failed
/// factorizations, non-finite residuals) end the solve with
/// [`SolveStatus::NumericalBreakdown`] and the trace up to that point.
pub fn solve_observed(
    problem: &dyn Problem,
    x0: &[f64],
    config: &SolverConfig,
    observer: &mut dyn FnMut(&StepView<'_>),
) -> Result<SolveTrace> {
    check_inputs(problem, x0, config)?;
    if config.method.is_glm_hybrid() {
        return Err(Error::RequiresGlm(config.method.name()));
    }
    let m = problem.rows();
    let n = problem.cols();
    let mut rng = SeededRng::new(config.seed);
    let mut trace = TraceBuilder::new(config, problem.known_root());
    let mut x = x0.to_vec();
    let mut f = vec![0.0; m];
    let mut g2 = vec![0.0; m];
    let mut grad = vec![0.0; n];
    let mut k = 0usize;

    loop {
        problem.residual_into(&x, &mut f);
        let r2 = norm_sq(&f);
        if !r2.is_finite() {
            trace.record(k, r2, &x, Vec::new(), 0);
            let why = "non-finite residual".to_string();
            return Ok(trace.finish(SolveStatus::NumericalBreakdown, x, k, Some(why)));
        }
        match check_stop(r2, k, config) {
            StopDecision::Converged => {
                trace.record(k, r2, &x, Vec::new(), 0);
                return Ok(trace.finish(SolveStatus::Converged, x, k, None));
            }
            StopDecision::CapReached => {
                trace.record(k, r2, &x, Vec::new(), 0);
                return Ok(trace.finish(SolveStatus::IterationCapReached, x, k, None));
            }
            StopDecision::Continue => {}
        }

        let outcome: Result<(Vec<f64>, Vec<usize>, Option<SelectionResult>)> = (|| {
            let single = |i: usize, grad: &mut Vec<f64>| -> Result<Vec<f64>> {
                problem.row_gradient_into(i, &x, grad);
                kaczmarz_step(&x, f[i], grad)
            };
            match config.method {
                MethodKind::Nk => {
                    let i = k % m;
                    Ok((single(i, &mut grad)?, vec![i], None))
                }
                MethodKind::Nurk => {
                    let i = rng.draw_index(m);
                    Ok((single(i, &mut grad)?, vec![i], None))
                }
                MethodKind::Nrk => {
                    let weights: Vec<f64> = f.iter().map(|v| v * v).collect();
                    let i = sample_weighted(&weights, &mut rng)?;
                    Ok((single(i, &mut grad)?, vec![i], None))
                }
                MethodKind::DrCnk | MethodKind::RdCnk => {
                    problem.grad_sq_norms_into(&x, &mut g2);
                    let geom = RowGeometry::new(f.clone(), g2.clone());
                    let sel = greedy_set(&geom, config.method, config.threshold)?;
                    let i = sample_index(&sel, &mut rng)?;
                    Ok((single(i, &mut grad)?, vec![i], Some(sel)))
                }
                MethodKind::DbCnk | MethodKind::RbCnk => {
                    problem.grad_sq_norms_into(&x, &mut g2);
                    let geom = RowGeometry::new(f.clone(), g2.clone());
                    let sel = greedy_set(&geom, config.method, config.threshold)?;
                    let f_tau: Vec<f64> = sel.set.iter().map(|&i| f[i]).collect();
                    let jac = problem.jacobian_rows(&sel.set, &x);
                    let next = block_update(&x, &jac, &f_tau)?;
                    Ok((next, sel.set.clone(), Some(sel)))
                }
                MethodKind::GlmHybridDb | MethodKind::GlmHybridRb => unreachable!("rejected above"),
            }
        })();

        let (next, selected, sel) = match outcome {
            Ok(v) => v,
            Err(e) => {
                trace.record(k, r2, &x, Vec::new(), 0);
                return Ok(trace.finish(SolveStatus::NumericalBreakdown, x, k, Some(e.to_string())));
            }
        };
        observer(&StepView {
            k,
            x: &x,
            x_next: &next,
            residual: &f,
            selection: sel.as_ref(),
            selected: &selected,
        });
        let set_size = sel.as_ref().map_or(selected.len(), |s| s.set.len());
        trace.record(k, r2, &x, selected, set_size);
        x = next;
        k += 1;
    }
}

/// Hybrid block scheme for the GLM system.
///
/// Each iteration first projects onto the coupling rows with a min-norm
/// solve (they are linear, so this zeroes them), then builds the capped set
/// over the sample rows only, at the updated point, and projects onto it.
/// Both sub-steps share one iteration index; the record's
/// `coupling_residual_sq` holds the coupling residual after the first.
pub fn solve_glm_hybrid(glm: &GlmProblem, x0: &[f64], config: &SolverConfig) -> Result<SolveTrace> {
    solve_glm_hybrid_observed(glm, x0, config, &mut |_: &StepView<'_>| {})
}

pub fn solve_glm_hybrid_observed(
    glm: &GlmProblem,
    x0: &[f64],
    config: &SolverConfig,
    observer: &mut dyn FnMut(&StepView<'_>),
) -> Result<SolveTrace> {
    check_inputs(glm, x0, config)?;
    if !config.method.is_glm_hybrid() {
        return Err(Error::InvalidConfig(format!(
            "solve_glm_hybrid needs a hybrid method, got {}",
            config.method
        )));
    }
    let coupling: Vec<usize> = glm.coupling_rows().collect();
    let offset = glm.d();
    let mut trace = TraceBuilder::new(config, glm.known_root());
    let mut x = x0.to_vec();
    let mut k = 0usize;

    loop {
        let f = glm.residual(&x);
        let r2 = norm_sq(&f);
        if !r2.is_finite() {
            trace.record(k, r2, &x, Vec::new(), 0);
            let why = "non-finite residual".to_string();
            return Ok(trace.finish(SolveStatus::NumericalBreakdown, x, k, Some(why)));
        }
        match check_stop(r2, k, config) {
            StopDecision::Converged => {
                trace.record(k, r2, &x, Vec::new(), 0);
                return Ok(trace.finish(SolveStatus::Converged, x, k, None));
            }
            StopDecision::CapReached => {
                trace.record(k, r2, &x, Vec::new(), 0);
                return Ok(trace.finish(SolveStatus::IterationCapReached, x, k, None));
            }
            StopDecision::Continue => {}
        }

        let outcome: Result<(Vec<f64>, f64, Option<SelectionResult>)> = (|| {
            let jac_c = glm.jacobian_rows(&coupling, &x);
            let x_mid = block_update(&x, &jac_c, &f[..offset])?;
            let f_mid = glm.residual(&x_mid);
            let coupling_sq = norm_sq(&f_mid[..offset]);
            let sample_f = f_mid[offset..].to_vec();
            if norm_sq(&sample_f) == 0.0 {
                return Ok((x_mid, coupling_sq, None));
            }
            let g2 = glm.grad_sq_norms(&x_mid);
            let geom = RowGeometry::new(sample_f, g2[offset..].to_vec());
            let sel = greedy_set(&geom, config.method, config.threshold)?.offset(offset);
            let f_tau: Vec<f64> = sel.set.iter().map(|&i| f_mid[i]).collect();
            let jac = glm.jacobian_rows(&sel.set, &x_mid);
            let next = block_update(&x_mid, &jac, &f_tau)?;
            Ok((next, coupling_sq, Some(sel)))
        })();

        let (next, coupling_sq, sel) = match outcome {
            Ok(v) => v,
            Err(e) => {
                trace.record(k, r2, &x, Vec::new(), 0);
                return Ok(trace.finish(SolveStatus::NumericalBreakdown, x, k, Some(e.to_string())));
            }
        };
        let selected = sel.as_ref().map(|s| s.set.clone()).unwrap_or_default();
        observer(&StepView {
            k,
            x: &x,
            x_next: &next,
            residual: &f,
            selection: sel.as_ref(),
            selected: &selected,
        });
        let set_size = selected.len();
        trace.record(k, r2, &x, selected, set_size);
        if let Some(last) = trace.records.last_mut() {
            last.coupling_residual_sq = Some(coupling_sq);
        }
        x = next;
        k += 1;
    }
}

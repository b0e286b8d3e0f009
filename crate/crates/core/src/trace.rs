use serde::{Deserialize, Serialize};

/// State at iteration `k`, together with the rows chosen to leave it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub residual_sq: f64,
    /// Rows used for the update out of `x_k` (0-based). Empty on the final
    /// record, where no update happens.
    pub selected: Vec<usize>,
    /// `|U_k|` or `|I_k|` for greedy methods, 1 for the baselines.
    pub set_size: usize,
    /// Seconds since the solve started.
    pub elapsed: f64,
    pub error_sq: Option<f64>,
    /// GLM hybrid only: squared residual of the coupling rows right after
    /// the min-norm sub-step.
    pub coupling_residual_sq: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationCapReached,
    NumericalBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub status: SolveStatus,
    pub final_x: Vec<f64>,
    /// Number of updates performed.
    pub total_iterations: usize,
    pub total_seconds: f64,
    /// Reason for a breakdown, if one happened.
    pub breakdown: Option<String>,
}

impl SolveTrace {
    pub fn final_residual_sq(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.residual_sq)
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

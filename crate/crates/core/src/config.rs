use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index selection rule driving a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodKind {
    /// Cyclic rows.
    Nk,
    /// Uniformly random rows.
    Nurk,
    /// Rows drawn with probability proportional to `|f_i|^2`.
    Nrk,
    /// Distance-rule capped set, residual-weighted draw.
    DrCnk,
    /// Residual-rule capped set, distance-weighted draw.
    RdCnk,
    /// Block projection onto the distance-rule capped set.
    DbCnk,
    /// Block projection onto the residual-rule capped set.
    RbCnk,
    /// GLM split: min-norm solve of the coupling rows, then `DbCnk` on the
    /// sample rows.
    GlmHybridDb,
    /// As [`MethodKind::GlmHybridDb`] with the residual rule.
    GlmHybridRb,
}

impl MethodKind {
    pub const ALL: [MethodKind; 9] = [
        MethodKind::Nk,
        MethodKind::Nurk,
        MethodKind::Nrk,
        MethodKind::DrCnk,
        MethodKind::RdCnk,
        MethodKind::DbCnk,
        MethodKind::RbCnk,
        MethodKind::GlmHybridDb,
        MethodKind::GlmHybridRb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Nk => "nk",
            MethodKind::Nurk => "nurk",
            MethodKind::Nrk => "nrk",
            MethodKind::DrCnk => "dr-cnk",
            MethodKind::RdCnk => "rd-cnk",
            MethodKind::DbCnk => "db-cnk",
            MethodKind::RbCnk => "rb-cnk",
            MethodKind::GlmHybridDb => "glm-hybrid-db",
            MethodKind::GlmHybridRb => "glm-hybrid-rb",
        }
    }

    pub fn is_block(self) -> bool {
        matches!(
            self,
            MethodKind::DbCnk | MethodKind::RbCnk | MethodKind::GlmHybridDb | MethodKind::GlmHybridRb
        )
    }

    pub fn is_glm_hybrid(self) -> bool {
        matches!(self, MethodKind::GlmHybridDb | MethodKind::GlmHybridRb)
    }

    /// Methods whose iterates do not depend on the seed.
    pub fn is_deterministic(self) -> bool {
        matches!(self, MethodKind::Nk) || self.is_block()
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        MethodKind::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

/// How the capped thresholds are formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThresholdMode {
    /// Convex blend of the greedy max term and the average term, `theta` in `[0, 1]`.
    Convex(f64),
    /// Scaled greedy max term alone, `xi` in `(0, 1]`.
    Scaled(f64),
}

impl Default for ThresholdMode {
    fn default() -> Self {
        ThresholdMode::Convex(0.5)
    }
}

impl ThresholdMode {
    pub fn validate(self) -> Result<()> {
        match self {
            ThresholdMode::Convex(t) if (0.0..=1.0).contains(&t) => Ok(()),
            ThresholdMode::Scaled(x) if x > 0.0 && x <= 1.0 => Ok(()),
            ThresholdMode::Convex(t) => Err(Error::InvalidConfig(format!("theta {t} outside [0, 1]"))),
            ThresholdMode::Scaled(x) => Err(Error::InvalidConfig(format!("xi {x} outside (0, 1]"))),
        }
    }

    pub fn is_default(self) -> bool {
        self == ThresholdMode::Convex(0.5)
    }
}

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: MethodKind,
    pub threshold: ThresholdMode,
    /// Convergence threshold on `||f(x_k)||^2`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Track `||x_k - x*||^2` when the problem knows its root.
    pub record_error: bool,
    /// Capture wall-clock time per iteration. When off every `elapsed` is 0,
    /// which makes traces byte-reproducible.
    pub timing: bool,
}

impl SolverConfig {
    pub fn new(method: MethodKind) -> Self {
        Self {
            method,
            threshold: ThresholdMode::default(),
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            record_error: false,
            timing: true,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_threshold(mut self, mode: ThresholdMode) -> Self {
        self.threshold = mode;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_record_error(mut self, on: bool) -> Self {
        self.record_error = on;
        self
    }

    pub fn with_timing(mut self, on: bool) -> Self {
        self.timing = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.threshold.validate()?;
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Continue,
    Converged,
    CapReached,
}

/// Stopping rule: converged once `residual_sq < tol`, capped once
/// `k >= max_iter`.
pub fn check_stop(residual_sq: f64, k: usize, config: &SolverConfig) -> StopDecision {
    if residual_sq < config.tol {
        StopDecision::Converged
    } else if k >= config.max_iter {
        StopDecision::CapReached
    } else {
        StopDecision::Continue
    }
}

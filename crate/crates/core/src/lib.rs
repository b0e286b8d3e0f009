//! Greedy capped nonlinear Kaczmarz methods for square or overdetermined
//! systems `f(x) = 0`.
//!
//! Single-row methods ([`MethodKind::DrCnk`], [`MethodKind::RdCnk`]) sample
//! one row from a greedy capped set per step; block methods
//! ([`MethodKind::DbCnk`], [`MethodKind::RbCnk`]) project onto the joint
//! linearization of the whole set. The classical NK, NURK and NRK variants
//! share the same driver for comparison.
//!
//! ```
//! use cnk::{solve, BrownProblem, MethodKind, SolverConfig};
//!
//! let brown = BrownProblem::new(10);
//! let config = SolverConfig::new(MethodKind::RbCnk);
//! let trace = solve(&brown, &brown.initial_point(), &config).unwrap();
//! assert!(trace.converged());
//! ```

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod problem;
pub mod problems;
pub mod selection;
pub mod solvers;
pub mod trace;

pub use config::{check_stop, MethodKind, SolverConfig, StopDecision, ThresholdMode};
pub use error::{Error, Result};
pub use numerics::{DenseMatrix, SeededRng};
pub use problem::Problem;
pub use problems::{make_glm, make_linear, parse_libsvm, parse_libsvm_file, BrownProblem, Dataset, GlmProblem, LinearProblem};
pub use solvers::{block_step, kaczmarz_step, solve, solve_glm_hybrid, solve_observed, StepView};
pub use trace::{IterationRecord, SolveStatus, SolveTrace};

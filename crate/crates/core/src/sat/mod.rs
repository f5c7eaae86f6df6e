//! Embedded CDCL SAT engine.
//!
//! Two-watched-literal propagation, first-UIP clause learning, VSIDS
//! branching and Luby restarts. Everything is deterministic: there are no
//! wall-clock or randomised heuristics, so the same clause database always
//! yields the same sequence of models.

mod cnf;
mod dimacs;
mod enumerate;
mod solver;

pub use cnf::{Cnf, Lit, Var};
pub use dimacs::{export_dimacs, parse_dimacs, DimacsError};
pub use enumerate::{enumerate, ModelEnumerator};
pub use solver::{Model, SolveResult, Solver, SolverConfig, SolverStats};

use thiserror::Error;

/// Environment variable that overrides the per-call conflict budget.
pub const CONFLICT_LIMIT_ENV: &str = "TRACER_SAT_CONFLICT_LIMIT";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("conflict limit of {limit} reached")]
    ConflictLimit { limit: u64 },
    #[error("solver produced a model that violates clause #{clause}")]
    SelfCheck { clause: usize },
}

/// One-shot convenience wrapper: load `cnf` into a fresh solver and solve
/// under `assumptions`.
pub fn solve(cnf: &Cnf, assumptions: &[Lit]) -> Result<SolveResult, SatError> {
    let mut solver = Solver::from_cnf(cnf, SolverConfig::from_env());
    solver.solve(assumptions)
}

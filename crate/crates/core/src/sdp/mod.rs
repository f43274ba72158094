//! Self-contained numerical solver for block-diagonal LMI problems,
//! plus the dense symmetric linear algebra it relies on.
//!
//! Covers both the semidefinite relaxations (dense PSD blocks) and, as the
//! 1×1/diagonal special case, plain linear programs.

pub mod linalg;
pub mod problem;
pub mod real;
pub mod solver;

pub use linalg::{min_eigenvalue, sym_eigenvalues, Mat};
pub use problem::{BlockKind, BlockMatrix, SdpProblem};
pub use solver::{solve, Precision, Solution, SolveStatus, SolverConfig};

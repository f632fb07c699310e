//! Generalized conditional gradient (generalized Frank-Wolfe) solver for
//! `min f(u) + g(u)`.
//!
//! Each iteration asks the problem's linear minimization oracle for
//! `v ∈ argmin ⟨∇f(u), v⟩ + g(v)`, reads off the gap `Ψ(u)`, and moves
//! towards `v` with a quasi-Armijo backtracking step.

pub mod armijo;
pub mod gap;
pub mod gcg;
pub mod problem;
pub mod testing;

pub use armijo::{armijo_step, ArmijoParams, ArmijoStep, DEFAULT_MAX_BACKTRACKS};
pub use gap::{dual_gap, eps_fp, EPS_FP_REL};
pub use gcg::{gcg_solve, gcg_solve_observed, IterateRecord, IterateView, SolveResult, SolveStatus, SolverConfig};
pub use problem::{objective, CompositeProblem, SegmentFn};

//! Generalized conditional gradient methods for composite problems
//! `min f(u) + g(u)`, with two PDE-constrained sparse control instances and
//! post-hoc convergence diagnostics.

pub mod analysis;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod io;
pub mod parabolic;
pub mod pde;
pub mod registry;
pub mod run;
pub mod solver;

pub use error::{GcgError, Result};
pub use field::{ControlField, GridMeta};
pub use solver::{gcg_solve, ArmijoParams, CompositeProblem, SolveResult, SolveStatus, SolverConfig};

//! Finite-difference PDE kernels: grids, the Dirichlet Laplacian, Poisson and
//! heat solves, weighted norms, and operator constants.

pub mod constants;
pub mod grid;
pub mod heat;
pub mod norms;
pub mod operator;

pub use constants::{estimate_c_constant, heat_c_constant};
pub use grid::{Dim, Grid, SpaceTimeGrid};
pub use heat::{heat_adjoint, heat_forward, HeatSolver};
pub use operator::{assemble_laplacian, solve_poisson, DiscreteOperator};

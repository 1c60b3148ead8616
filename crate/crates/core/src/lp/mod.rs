//! Sparse linear programming: problem container, revised simplex and MPS export.

mod lu;
mod mps;
mod problem;
mod simplex;

pub use mps::{export_lp, to_mps_string};
pub use problem::{LpProblem, LpRow, RowRef};
pub use simplex::{
    solve_lp, solve_lp_with, FarkasCertificate, LpSolution, LpStatus, SimplexOptions,
};

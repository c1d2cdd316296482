//! Outer approximation of the weakly nondominated set of strictly
//! quasiconvex multiobjective programs by copolyblocks.

pub mod bounds;
pub mod cli;
pub mod copolyblock;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod model;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod scalarize;

pub use bounds::{make_box, OutcomeBox};
pub use copolyblock::VertexSet;
pub use driver::{es_membership, solve, EsMembership, Selection, SolveOptions, SolveResult};
pub use error::{QvpError, Result};
pub use model::{ConvexConstraint, FeasibleSet, ObjectiveFunction};
pub use oracle::{check_feasible, OracleSettings};
pub use problem::QvpProblem;
pub use scalarize::{solve_chebyshev, verify_wes, Direction, SolverSettings};

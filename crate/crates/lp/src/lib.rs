//! Linear programming layer: model building, a bounded revised simplex with
//! warm starts after row additions, duality certificates and a CPLEX-style
//! LP text format.

pub mod audit;
mod factor;
pub mod lpfile;
mod model;
mod simplex;
mod solution;
mod solver;

pub use model::{Constraint, LinearProgram, ObjectiveSense, RowId, Sense, VarId, Variable};
pub use solution::{Certificate, LpSolution, Status, Tolerances};
pub use solver::{solve, Limits, Solver};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("non-finite value in {0}")]
    NotFinite(String),
    #[error("variable {var} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

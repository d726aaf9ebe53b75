//! Bounds for the quadratic minimum spanning tree problem: instance
//! generators, Gilmore-Lawler type bounds, LP relaxations over an extended
//! spanning tree formulation with Boolean quadric cuts, heuristic upper
//! bounds and an exhaustive oracle for small graphs.

pub mod bench;
pub mod bound;
pub mod cuts;
pub mod extbounds;
pub mod glbounds;
pub mod heuristics;
pub mod instance;
pub mod mst;
pub mod oracle;
pub mod verify;

pub use instance::{generate, read_instance, write_instance, Family, GeneratorSpec, Instance};
pub use mst::{mst, mst_with_forced_edge, SpanningTree};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("Q is not symmetric: Q[{row}][{col}] = {upper} but Q[{col}][{row}] = {lower}")]
    Asymmetric { row: usize, col: usize, upper: f64, lower: f64 },
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("generator: {0}")]
    Generator(String),
    #[error("not a spanning tree: {0}")]
    NotATree(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("LP: {0}")]
    Lp(String),
}

impl From<qmstp_lp::LpError> for Error {
    fn from(e: qmstp_lp::LpError) -> Self {
        Error::Lp(e.to_string())
    }
}

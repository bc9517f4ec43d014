//! Continuous P1/P2 finite elements on the periodic fluid cell: spaces with
//! periodic identification and wall elimination, Galerkin assembly, Stokes
//! blocks and direct sparse solves.

mod assembly;
mod discretization;
mod element;
mod field;
pub mod mms;
mod quadrature;
mod space;
mod sparse;
mod stokes;

pub use assembly::{
    assemble_scalar, boundary_load, load_vector, mean_row, shape_at, shape_values, Coef,
    LinearSystem, ScalarForm,
};
pub use discretization::Discretization;
pub use element::{p2_gradients, p2_values, Element, QuadData, LOCAL_EDGES};
pub use field::{l2_error, Field};
pub use quadrature::{EDGE_RULE, NQ, TRI_POINTS, TRI_WEIGHTS};
pub use space::{FeSpace, Topology, NONE};
pub use sparse::{residual, Csr, Factorization, SOLVE_TOL};
pub use stokes::{assemble_stokes, push_stokes_blocks, StokesLayout};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FemError {
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("relative residual {0:e} above threshold")]
    Residual(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("sparse solver: {0}")]
    Solver(String),
}

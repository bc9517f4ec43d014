//! Cell problems and the homogenized Onsager tensor.
//!
//! For every direction k and every source (pressure gradient, or the
//! electro-diffusive force on species l) one monolithic system in
//! (v, π, θ_1..θ_N) is solved on the fluid cell. With
//! K̃_ij = z_i z_j n_i K_ij / Pe_i the weak form reads
//!
//! ∫∇v:∇w − ∫π div w − Σ_j z_j ∫ n_j ∇θ_j·w = ∫ f·w
//! −∫ q div v = 0
//! −Σ_j ∫ K̃_ij ∇θ_j·∇φ − z_i ∫ n_i v·∇φ = Σ_j ∫ K̃_ij λ^j·∇φ
//!
//! with f = λ⁰ + Σ_j z_j n_j λ^j. Velocity is P2, pressure and θ_j are P1.
//! The matrix is symmetric indefinite; the pressure and every θ_j carry a
//! zero-mean multiplier.

mod cell;
mod tensor;

pub use cell::{neutral_permeability, theta_space, solve_cell_problems, CellLayout, CellSolutionSet};
pub use tensor::{
    assemble_effective_tensor, energy_identity, onsager_check, EffectiveTensor, OnsagerReport, DIM,
};

use crate::fem::FemError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UpscaleError {
    #[error("cell problems need equal ion diameters; got {0:?} m")]
    UnequalDiameters(Vec<f64>),
    #[error("equilibrium field does not match the discretization ({0})")]
    Mismatch(String),
    #[error(transparent)]
    Fem(#[from] FemError),
}

//! Unit-cell Poisson–Boltzmann equilibrium with MSA closures.
//!
//! Weak form on the periodic fluid cell, for all periodic P2 test functions φ:
//!
//! ∫ ∇Ψ·∇φ = β ∫ Σ_j z_j n_j(Ψ) φ + N_σ ∫_S Σ* φ,
//!
//! i.e. ∂_νΨ = N_σ Σ* on the solid boundary with ν the outward normal of the
//! fluid. A negative Σ* gives a negative wall potential.
//!
//! The solve is the three-level scheme: an outer fixed point on the hard-sphere
//! term, an inner fixed point on the screening field Γ, and a damped Newton
//! method on the semilinear problem with both frozen. Γ and p(ξ) live at the
//! quadrature points.

mod report;
mod solver;

pub use report::{equilibrium_diagnostics, export_csv, EquilibriumReport};
pub use solver::{solve_equilibrium, EquilibriumOptions};

use crate::fem::{FemError, Field};
use crate::mesh::Point;
use crate::msa::{Model, MsaError};
use std::fmt;
use std::sync::Arc;

/// Dimensionless surface charge Σ* on the solid boundary (units of Σ_c).
#[derive(Clone)]
pub enum SurfaceCharge {
    Uniform(f64),
    /// One value per inclusion.
    PerInclusion(Vec<f64>),
    /// Arbitrary function of the boundary point and inclusion index.
    Custom(Arc<dyn Fn(Point, usize) -> f64 + Send + Sync>),
}

impl SurfaceCharge {
    pub fn value(&self, p: Point, inclusion: usize) -> f64 {
        match self {
            SurfaceCharge::Uniform(v) => *v,
            SurfaceCharge::PerInclusion(v) => v.get(inclusion).copied().unwrap_or(0.0),
            SurfaceCharge::Custom(f) => f(p, inclusion),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SurfaceCharge::Uniform(v) => *v == 0.0,
            SurfaceCharge::PerInclusion(v) => v.iter().all(|x| *x == 0.0),
            SurfaceCharge::Custom(_) => false,
        }
    }
}

impl Default for SurfaceCharge {
    fn default() -> Self {
        SurfaceCharge::Uniform(-1.0)
    }
}

impl fmt::Debug for SurfaceCharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceCharge::Uniform(v) => write!(f, "Uniform({v})"),
            SurfaceCharge::PerInclusion(v) => write!(f, "PerInclusion({v:?})"),
            SurfaceCharge::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Iteration history of one equilibrium solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    /// Residual norms of every Newton solve, in order.
    pub newton_residuals: Vec<Vec<f64>>,
    /// Accepted step lengths of every Newton solve.
    pub newton_steps: Vec<Vec<f64>>,
    /// sup-norm change of Γ after each inner update.
    pub inner_updates: Vec<f64>,
    /// sup-norm change of Ψ after each outer iteration.
    pub outer_updates: Vec<f64>,
    pub newton_iters: usize,
    pub inner_iters: usize,
    pub outer_iters: usize,
    /// β values used when continuation was needed.
    pub continuation: Vec<f64>,
}

impl SolveTrace {
    /// Largest r_{k+1}/r_k² over the last two steps of the final Newton solve.
    pub fn quadratic_constant(&self) -> Option<f64> {
        let r = self.newton_residuals.iter().rev().find(|r| r.len() >= 3)?;
        let k = r.len();
        let (a, b) = (r[k - 2], r[k - 1]);
        (a > 0.0).then(|| b / (a * a))
    }
}

/// Solved equilibrium: Ψ⁰ as a periodic P2 field, coefficient fields at the
/// quadrature points (index `t * NQ + q`).
#[derive(Debug, Clone)]
pub struct EquilibriumField {
    pub model: Model,
    pub psi: Field,
    /// n_j⁰ per species, at quadrature points.
    pub n: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub xi: Vec<f64>,
    /// K_ij per quadrature point, row-major N×N blocks.
    pub k: Vec<f64>,
    pub z: Vec<f64>,
    pub n_inf: Vec<f64>,
    pub beta: f64,
    pub n_sigma: f64,
    pub xi_c: f64,
    /// N_σ ∫_S Σ*.
    pub boundary_charge: f64,
    /// Scaled weak residual with closure-exact concentrations.
    pub weak_residual: f64,
    pub trace: SolveTrace,
}

impl EquilibriumField {
    pub fn n_species(&self) -> usize {
        self.z.len()
    }

    pub fn k_at(&self, q: usize, i: usize, j: usize) -> f64 {
        let n = self.n_species();
        self.k[q * n * n + i * n + j]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Msa(#[from] MsaError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("Newton diverged: residuals {residuals:?}, step lengths {steps:?}")]
    NewtonDivergence {
        residuals: Vec<f64>,
        steps: Vec<f64>,
    },
    #[error("{what} fixed point stagnated after {iters} iterations (last update {update:e})")]
    Stagnation {
        what: &'static str,
        iters: usize,
        update: f64,
    },
    #[error("packing fraction reached {0} (guard 1 - {1:e})")]
    PackingGuard(f64, f64),
}

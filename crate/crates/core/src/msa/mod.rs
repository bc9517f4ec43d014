//! Pointwise MSA closures and parameter algebra.
//!
//! Everything here works in dimensionless variables: concentrations in units
//! of n_c, potential in units of k_B T/e, screening in units of Γ_c. Dimensional
//! values only appear inside [`onsager_local`].

mod closure;
mod linearize;
mod onsager;
mod pressure;
mod scaling;
mod species;

pub use closure::{
    hard_sphere_dp, hard_sphere_p, local_state, reservoir_closure, solve_gamma, solve_gamma_frozen,
    solve_xi, LocalState, MsaParams, Reservoir, BOUND1, MAX_ITER, TOL_ALG,
};
pub use linearize::{linearization_coeffs, LinearizationCoeffs};
pub use onsager::{onsager_local, OnsagerLocal};
pub use pressure::{equilibrium_pressure, PressureSample};
pub use scaling::Scaling;
pub use species::{Electrolyte, Solvent, Species, AVOGADRO, BOLTZMANN, ELEMENTARY_CHARGE};

use std::fmt;
use std::str::FromStr;

/// Electrolyte model: MSA closures or ideal (γ ≡ 1, K = I).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Msa,
    Ideal,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Msa => "msa",
            Model::Ideal => "ideal",
        })
    }
}

impl FromStr for Model {
    type Err = MsaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "msa" => Ok(Model::Msa),
            "ideal" => Ok(Model::Ideal),
            _ => Err(MsaError::InvalidInput(format!("unknown model '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MsaError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("packing fraction {0} outside [0, 1)")]
    XiDomain(f64),
    #[error("characteristic packing xi_c = {0} outside (0, 1)")]
    XiCOutOfRange(f64),
    #[error("reservoir is not electroneutral: relative charge defect {0:e}")]
    NotElectroneutral(f64),
    #[error("Bjerrum length too large for species {species}: L_B is {ratio:.3} times the limit (6+4*sqrt2)*sigma/z^2")]
    Bound1 { species: String, ratio: f64 },
    #[error("no convergence while solving for the {0}")]
    NoConvergence(&'static str),
    #[error(
        "relaxation denominator is nonpositive ({0:e} 1/m^2): outside the model's validity range"
    )]
    RelaxationDenominator(f64),
    #[error("linearization coefficient A = {0:e} is not positive")]
    LinearizationA(f64),
    #[error("pressure quadrature error estimate {0:e} too large")]
    Quadrature(f64),
}

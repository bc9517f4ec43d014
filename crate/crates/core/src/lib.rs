//! Homogenized Onsager tensor of an N-species electrolyte in a periodic
//! charged porous cell, with MSA (mean spherical approximation) closures and
//! an ideal comparison model.
//!
//! Pipeline: [`msa`] closures → [`mesh`] of the fluid cell → [`equilibrium`]
//! Poisson–Boltzmann solve → [`upscale`] cell problems and effective tensor →
//! [`sweep`] parameter studies.

pub mod equilibrium;
pub mod fem;
pub mod mesh;
pub mod msa;
pub mod sweep;
pub mod upscale;

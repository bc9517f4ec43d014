use super::EquilibriumField;
use crate::fem::{Discretization, Field, NONE};
use crate::msa::{local_state, Electrolyte, Model, MsaError, MsaParams, Reservoir, Scaling};
use std::fmt::Write as _;

/// Summary of a solved equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub psi_min: f64,
    pub psi_max: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    /// |Y_F|⁻¹ ∫ n_j⁰ per species.
    pub averages: Vec<f64>,
    pub weak_residual: f64,
    /// (β ∫ Σ z_j n_j⁰ + N_σ ∫_S Σ*) / max(1, |N_σ ∫_S Σ*|).
    pub charge_balance: f64,
    /// M = ln(1/ξ_c).
    pub bound_m: f64,
    /// −M/z_N ≤ Ψ⁰ ≤ M/|z_1| at every node.
    pub within_bounds: bool,
    pub newton_iters: usize,
    pub outer_iters: usize,
    pub quadratic_constant: Option<f64>,
}

impl std::fmt::Display for EquilibriumReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "Psi range        [{:.6}, {:.6}]",
            self.psi_min, self.psi_max
        )?;
        writeln!(
            f,
            "xi range         [{:.6e}, {:.6e}]",
            self.xi_min, self.xi_max
        )?;
        for (j, a) in self.averages.iter().enumerate() {
            writeln!(f, "avg n_{}          {:.9}", j + 1, a)?;
        }
        writeln!(f, "weak residual    {:.3e}", self.weak_residual)?;
        writeln!(f, "charge balance   {:.3e}", self.charge_balance)?;
        writeln!(
            f,
            "bound M          {:.6} (respected: {})",
            self.bound_m, self.within_bounds
        )?;
        write!(
            f,
            "iterations       newton {} outer {}",
            self.newton_iters, self.outer_iters
        )?;
        if let Some(c) = self.quadratic_constant {
            write!(f, " (Newton tail constant {c:.3e})")?;
        }
        Ok(())
    }
}

pub fn equilibrium_diagnostics(eq: &EquilibriumField, disc: &Discretization) -> EquilibriumReport {
    let w = &disc.quad.weights;
    let area = disc.fluid_area;
    let averages: Vec<f64> =
        eq.n.iter()
            .map(|nj| nj.iter().zip(w).map(|(n, w)| n * w).sum::<f64>() / area)
            .collect();
    let bulk: f64 = (0..w.len())
        .map(|q| {
            w[q] * (0..eq.n_species())
                .map(|j| eq.z[j] * eq.n[j][q])
                .sum::<f64>()
        })
        .sum();
    let charge_balance = (eq.beta * bulk + eq.boundary_charge) / eq.boundary_charge.abs().max(1.0);
    let nodal: Vec<f64> = nodal_values(&eq.psi, disc);
    let psi_min = nodal.iter().copied().fold(f64::INFINITY, f64::min);
    let psi_max = nodal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bound_m = (1.0 / eq.xi_c).ln();
    let z_min = eq.z.iter().copied().fold(f64::INFINITY, f64::min);
    let z_max = eq.z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let within_bounds = psi_min >= -bound_m / z_max && psi_max <= bound_m / z_min.abs();
    EquilibriumReport {
        psi_min,
        psi_max,
        xi_min: eq.xi.iter().copied().fold(f64::INFINITY, f64::min),
        xi_max: eq.xi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        averages,
        weak_residual: eq.weak_residual,
        charge_balance,
        bound_m,
        within_bounds,
        newton_iters: eq.trace.newton_iters,
        outer_iters: eq.trace.outer_iters,
        quadratic_constant: eq.trace.quadratic_constant(),
    }
}

fn nodal_values(psi: &Field, disc: &Discretization) -> Vec<f64> {
    (0..disc.p2.n_raw)
        .filter(|&i| disc.p2.node_dof[i] != NONE)
        .map(|i| psi.node_value(&disc.p2, i))
        .collect()
}

/// Point-sampled CSV at mesh vertices: `x,y,Psi,n_1..n_N,Gamma,xi`.
pub fn export_csv(
    eq: &EquilibriumField,
    disc: &Discretization,
    el: &Electrolyte,
    sc: &Scaling,
    res: &Reservoir,
) -> Result<String, MsaError> {
    let prm = MsaParams::new(el, sc);
    let mut out = String::from("x,y,Psi");
    for j in 0..eq.n_species() {
        write!(out, ",n_{}", j + 1).unwrap();
    }
    out.push_str(",Gamma,xi\n");
    for (v, p) in disc.mesh.vertices.iter().enumerate() {
        let psi = eq.psi.node_value(&disc.p2, v);
        let st = local_state(psi, &prm, res, eq.model)?;
        let xi = if eq.model == Model::Ideal { 0.0 } else { st.xi };
        write!(out, "{:.16e},{:.16e},{:.16e}", p[0], p[1], psi).unwrap();
        for n in &st.n {
            write!(out, ",{n:.16e}").unwrap();
        }
        writeln!(out, ",{:.16e},{:.16e}", st.gamma, xi).unwrap();
    }
    Ok(out)
}

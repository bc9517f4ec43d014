use super::closure::LocalState;
use super::scaling::Scaling;
use super::species::Electrolyte;
use super::{Model, MsaError};
use std::f64::consts::PI;

/// Local transport tensors. Matrices are row-major `N×N`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsagerLocal {
    pub n_species: usize,
    /// K_ij = (δ_ij + (k_B T/D_i) Ω_ij)(1 + R_ij), dimensionless.
    pub k: Vec<f64>,
    /// Coulombic hydrodynamic correction Ω^c_ij, m/(N·s).
    pub omega_c: Vec<f64>,
    /// Hard-sphere hydrodynamic correction Ω^HS_ij, m/(N·s).
    pub omega_hs: Vec<f64>,
    /// Electrostatic relaxation R_ij.
    pub relax: Vec<f64>,
    /// κ_q, 1/m.
    pub kappa_q: f64,
    /// X_0..X_3 (with the π/6 prefactor), m^(k-3).
    pub x_moments: [f64; 4],
    pub x3_tilde: f64,
}

impl OnsagerLocal {
    pub fn identity(n: usize) -> Self {
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            k[i * n + i] = 1.0;
        }
        Self {
            n_species: n,
            k,
            omega_c: vec![0.0; n * n],
            omega_hs: vec![0.0; n * n],
            relax: vec![0.0; n * n],
            kappa_q: 0.0,
            x_moments: [0.0; 4],
            x3_tilde: 0.0,
        }
    }

    pub fn k_at(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n_species + j]
    }
}

/// Evaluates the MSA transport corrections at a local state. Ideal mode returns K = I.
pub fn onsager_local(
    state: &LocalState,
    el: &Electrolyte,
    sc: &Scaling,
    model: Model,
) -> Result<OnsagerLocal, MsaError> {
    let sp = el.species();
    let nsp = sp.len();
    if model == Model::Ideal || state.n.iter().all(|&n| n == 0.0) {
        return Ok(OnsagerLocal::identity(nsp));
    }
    let sv = &el.solvent;
    let kt = sv.kt();
    let lb = sc.bjerrum_length;
    let n: Vec<f64> = state.n.iter().map(|v| v * sc.n_c).collect();
    let g = state.gamma * sc.gamma_c;
    let sig: Vec<f64> = sp.iter().map(|s| s.sigma).collect();
    let z: Vec<f64> = sp.iter().map(|s| s.z as f64).collect();
    let d: Vec<f64> = sp.iter().map(|s| s.d0).collect();
    let q: Vec<f64> = sig.iter().map(|s| 1.0 + g * s).collect();

    let mut x = [0.0; 4];
    for (k, xk) in x.iter_mut().enumerate() {
        *xk = PI / 6.0 * (0..nsp).map(|j| n[j] * sig[j].powi(k as i32)).sum::<f64>();
    }
    let x3_tilde = if x[0] > 0.0 {
        (3.0 * x[1] * x[2] + x[3] * x[0]) / (4.0 * x[0])
    } else {
        0.0
    };

    let coul_den = g
        + (0..nsp)
            .map(|k| n[k] * PI * lb * z[k] * z[k] * sig[k] / (q[k] * q[k]))
            .sum::<f64>();
    let hs_factor = (1.0 - x3_tilde / 5.0 + x3_tilde * x3_tilde / 10.0) / (1.0 + 2.0 * x3_tilde);

    let kappa2 = sv.e * sv.e / (sv.epsilon * kt)
        * (0..nsp).map(|i| n[i] * z[i] * z[i] * d[i]).sum::<f64>()
        / d.iter().sum::<f64>();
    let kappa = kappa2.sqrt();
    let relax_den = kappa2 + 2.0 * g * kappa + 2.0 * g * g
        - 2.0
            * PI
            * lb
            * (0..nsp)
                .map(|k| n[k] * z[k] * z[k] * (-kappa * sig[k]).exp() / (q[k] * q[k]))
                .sum::<f64>();
    if !(relax_den > 0.0) {
        return Err(MsaError::RelaxationDenominator(relax_den));
    }

    let mut out = OnsagerLocal::identity(nsp);
    out.kappa_q = kappa;
    out.x_moments = x;
    out.x3_tilde = x3_tilde;
    for i in 0..nsp {
        for j in 0..nsp {
            let ij = i * nsp + j;
            let oc = -z[i] * z[j] * lb * n[j] / (3.0 * sv.eta * q[i] * q[j] * coul_den);
            let ohs = -(sig[i] + sig[j]).powi(2) * n[j] * hs_factor / (12.0 * sv.eta);
            let s = sig[i] + sig[j];
            let shape = if s > 0.0 {
                (1.0 - (-2.0 * kappa * s).exp()) / s
            } else {
                2.0 * kappa
            };
            let r = kappa2 * sv.e * sv.e * z[i] * z[j] * shape
                / (3.0 * sv.epsilon * kt * q[i] * q[j] * relax_den);
            out.omega_c[ij] = oc;
            out.omega_hs[ij] = ohs;
            out.relax[ij] = r;
            let delta = if i == j { 1.0 } else { 0.0 };
            out.k[ij] = (delta + kt / d[i] * (oc + ohs)) * (1.0 + r);
        }
    }
    Ok(out)
}

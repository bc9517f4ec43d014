use super::closure::{hard_sphere_dp, LocalState, MsaParams};
use super::{Model, MsaError};

/// Linearization of the concentrations around an equilibrium state:
/// δn_i = Σ_k z_k α_ik δ(potential)_k.
///
/// Scalars are dimensionless: `b = p′/(1 + ξ p′)`, `c = Σ z_k² s_k n_k w_k`,
/// `d = Σ z_k² n_k w_k` with `w_k = (1 + a_k Γ)^{-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationCoeffs {
    pub n_species: usize,
    /// Row-major α_ik.
    pub alpha: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl LinearizationCoeffs {
    pub fn alpha_at(&self, i: usize, k: usize) -> f64 {
        self.alpha[i * self.n_species + k]
    }

    /// Σ_k z_k α_ik, equal to dn_i/dΨ along the equilibrium curve.
    pub fn dn_dpsi(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n_species)
            .map(|i| {
                (0..self.n_species)
                    .map(|k| z[k] * self.alpha_at(i, k))
                    .sum()
            })
            .collect()
    }
}

pub fn linearization_coeffs(
    state: &LocalState,
    prm: &MsaParams,
    model: Model,
) -> Result<LinearizationCoeffs, MsaError> {
    let nsp = prm.len();
    let n = &state.n;
    let mut alpha = vec![0.0; nsp * nsp];
    for i in 0..nsp {
        alpha[i * nsp + i] = -n[i];
    }
    if model == Model::Ideal {
        return Ok(LinearizationCoeffs {
            n_species: nsp,
            alpha,
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
        });
    }
    let g = state.gamma;
    let dp = hard_sphere_dp(state.xi)?;
    let b = dp / (1.0 + state.xi * dp);
    let w: Vec<f64> = prm.a.iter().map(|a| (1.0 + a * g).powi(-2)).collect();
    let z2: Vec<f64> = prm.z.iter().map(|z| z * z).collect();
    let c: f64 = (0..nsp).map(|k| z2[k] * prm.s[k] * n[k] * w[k]).sum();
    let d: f64 = (0..nsp).map(|k| z2[k] * n[k] * w[k]).sum();
    let bc = b * c;
    let a = 2.0 * g
        + 2.0
            * (0..nsp)
                .map(|k| n[k] * z2[k] * prm.a[k] * w[k] / (1.0 + prm.a[k] * g))
                .sum::<f64>()
        - prm.lb
            * (0..nsp)
                .map(|k| n[k] * z2[k] * z2[k] * w[k] * w[k])
                .sum::<f64>()
        + prm.lb * bc * d;
    if !(a > 0.0) {
        return Err(MsaError::LinearizationA(a));
    }
    for i in 0..nsp {
        for k in 0..nsp {
            let bk = b * prm.s[k];
            alpha[i * nsp + k] += bk * n[i] * n[k]
                - prm.lb / a * n[i] * n[k] * (z2[i] * w[i] - bc) * (z2[k] * w[k] - bk * d);
        }
    }
    Ok(LinearizationCoeffs {
        n_species: nsp,
        alpha,
        a,
        b,
        c,
        d,
    })
}
